#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rici/projection.hpp"

namespace rici {

ProjectionBenchResult bench_projection(std::size_t count, Prng rng) {
    if (count == 0) {
        throw std::invalid_argument("bench_projection: count must be >= 1");
    }
    using clock = std::chrono::steady_clock;

    Prng anchor_rng = rng.derive("anchor");
    OrientedPoint anchor;
    anchor.position = {anchor_rng.uniform(-1, 1), anchor_rng.uniform(-1, 1), anchor_rng.uniform(-1, 1)};
    do {
        anchor.normal = {anchor_rng.normal(), anchor_rng.normal(), anchor_rng.normal()};
    } while (squared_length(anchor.normal) < 1e-6);
    anchor.normal = normalized(anchor.normal);

    Prng point_rng = rng.derive("points");
    constexpr std::size_t chunk_size = std::size_t{1} << 20;
    constexpr std::size_t verify_stride = 4099;
    std::vector<Vec3f> points(std::min(count, chunk_size));
    std::vector<CylindricalCoord<float>> fast(points.size());
    std::vector<CylindricalCoord<float>> slow(points.size());

    ProjectionBenchResult result;
    result.count = count;
    const ProjectionBasis<float> basis = build_basis<float>(anchor);

    for (std::size_t done = 0; done < count;) {
        const std::size_t n = std::min(chunk_size, count - done);
        for (std::size_t i = 0; i < n; ++i) {
            points[i] = Vec3f(Vec3d{point_rng.uniform(-2, 2), point_rng.uniform(-2, 2),
                                    point_rng.uniform(-2, 2)});
        }

        const auto t0 = clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            fast[i] = basis.project(points[i]);
        }
        const auto t1 = clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            slow[i] = project_oracle<float>(anchor, points[i]);
        }
        const auto t2 = clock::now();
        result.two_rotation_seconds += std::chrono::duration<double>(t1 - t0).count();
        result.oracle_seconds += std::chrono::duration<double>(t2 - t1).count();

        for (std::size_t i = 0; i < n; ++i) {
            result.two_rotation_checksum += double(fast[i].alpha) + double(fast[i].beta);
            result.oracle_checksum += double(slow[i].alpha) + double(slow[i].beta);
        }
        for (std::size_t i = (verify_stride - done % verify_stride) % verify_stride; i < n;
             i += verify_stride) {
            const double deviation = std::max(std::abs(double(fast[i].alpha) - double(slow[i].alpha)),
                                              std::abs(double(fast[i].beta) - double(slow[i].beta)));
            result.max_subsample_deviation = std::max(result.max_subsample_deviation, deviation);
        }
        done += n;
    }
    if (result.max_subsample_deviation > 1e-4) {
        throw std::runtime_error("bench_projection: projection paths disagree beyond 1e-4");
    }
    return result;
}

}  // namespace rici
