#pragma once

#include <stdexcept>
#include <string>

namespace rici {

/// Input data could not be used: unreadable/malformed files, empty geometry,
/// incompatible descriptor files. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violations (bad resolution, negative radius, ...) throw
// std::invalid_argument.

}  // namespace rici
