#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace rici {

/// splitmix64 finalizer. Used to mix seeds, never as a stream generator.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the bytes of a label.
constexpr std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic random stream.
///
/// The engine is std::mt19937_64. Child streams are derived by hashing the
/// parent seed together with a stage label and an index, so a stream's
/// contents depend only on its derivation path and never on evaluation order
/// or thread count. Real-valued draws use the top 53 bits of one engine
/// output, which keeps them independent of the standard library's
/// distribution implementations.
class Prng {
    __extension__ using u128 = unsigned __int128;

public:
    explicit Prng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }
    const std::vector<std::string>& path() const { return path_; }

    /// Child stream for a labelled stage. Does not advance this stream.
    Prng derive(std::string_view label, std::uint64_t index = 0) const {
        Prng child(mix64(seed_ ^ mix64(hash_label(label) + mix64(index))));
        child.path_ = path_;
        child.path_.emplace_back(std::string(label) + "#" + std::to_string(index));
        return child;
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) {
            return 0;
        }
        const std::uint64_t threshold = (0 - n) % n;
        while (true) {
            const u128 m = static_cast<u128>(engine_()) * n;
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    /// Standard normal via Box-Muller (one value per call, the sine branch is discarded).
    double normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::vector<std::string> path_;
};

}  // namespace rici
