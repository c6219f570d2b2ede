#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rici/clutterbox.hpp"
#include "rici/mesh.hpp"

namespace rici {

/// Clutterbox-style scene built from synthetic meshes. Object 0 is the
/// reference; its vertices come first in `mesh`.
struct BenchScene {
    TriangleMesh mesh;
    std::vector<TriangleMesh> objects;
    std::size_t reference_vertex_count{0};
};

/// `object_count` normalized synthetic meshes at random poses inside a box of
/// side `box_side`.
BenchScene synthetic_bench_scene(int object_count, std::uint64_t seed, double box_side = 3.0);

struct GenerationBenchRow {
    Method method{Method::Rici};
    int objects{0};
    std::size_t triangles{0};
    std::size_t descriptors{0};
    double seconds{0};

    double descriptors_per_second() const { return seconds > 0 ? double(descriptors) / seconds : 0.0; }
};

struct GenerationBenchConfig {
    double support_radius{0.3};
    int resolution{64};
    int samples_per_triangle{10};
    /// Upper bound on anchors per measurement; 0 means every unique vertex.
    std::size_t max_anchors{0};
    std::uint64_t seed{0};
    /// Each measurement is the fastest of this many runs.
    int repetitions{3};
};

/// Times descriptor generation at the unique vertices of `scene`. Sampling and
/// acceleration-structure construction are excluded.
GenerationBenchRow bench_generation(const BenchScene& scene, int objects, Method method,
                                    const GenerationBenchConfig& config);

struct MatchingBenchRow {
    std::string kernel;
    std::size_t comparisons{0};
    double seconds{0};
    /// Sum of all distances, to keep the work observable.
    double checksum{0};

    double comparisons_per_second() const { return seconds > 0 ? double(comparisons) / seconds : 0.0; }
};

/// Compares reference-object descriptors against every scene descriptor.
/// Kernels: crd-full, crd-early-exit (threshold = correspondent distance - 1,
/// as in ranking), pearson and 3dsc.
std::vector<MatchingBenchRow> bench_matching(const BenchScene& scene, const GenerationBenchConfig& config,
                                             std::size_t max_needles);

}  // namespace rici
