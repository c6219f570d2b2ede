#include "rici/throughput.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "rici/rici_descriptor.hpp"
#include "rici/shape_context.hpp"
#include "rici/spin_image.hpp"
#include "rici/synthetic.hpp"

namespace rici {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<OrientedPoint> capped(std::vector<OrientedPoint> points, std::size_t cap) {
    if (cap > 0 && points.size() > cap) {
        points.resize(cap);
    }
    return points;
}

std::vector<SampledPoint> scene_samples(const BenchScene& scene, const GenerationBenchConfig& config,
                                        const char* label) {
    const SceneObject object{&scene.mesh, 0};
    Prng rng = Prng(config.seed).derive(label);
    return sample_point_cloud(std::span(&object, 1),
                              static_cast<std::size_t>(config.samples_per_triangle) * scene.mesh.triangle_count(),
                              rng);
}

}  // namespace

BenchScene synthetic_bench_scene(int object_count, std::uint64_t seed, double box_side) {
    if (object_count < 1) {
        throw std::invalid_argument("synthetic_bench_scene: object_count must be >= 1");
    }
    if (!(box_side >= 2.0)) {
        throw std::invalid_argument("synthetic_bench_scene: box side must be at least 2");
    }
    const Prng root(seed);
    BenchScene scene;
    for (int k = 0; k < object_count; ++k) {
        Prng shape_rng = root.derive("bench-shape", static_cast<std::uint64_t>(k));
        TriangleMesh mesh;
        switch (k % 3) {
            case 0:
                mesh = bumpy_blob(shape_rng);
                break;
            case 1:
                mesh = wobbly_torus(shape_rng);
                break;
            default:
                mesh = lumpy_superellipsoid(shape_rng);
                break;
        }
        Prng placement = root.derive("bench-placement", static_cast<std::uint64_t>(k));
        const Vec3d center{placement.uniform(1.0, box_side - 1.0), placement.uniform(1.0, box_side - 1.0),
                           placement.uniform(1.0, box_side - 1.0)};
        const RigidTransform t = RigidTransform::random_rotation(placement, center);
        scene.objects.push_back(apply_transform(normalize_to_unit_sphere(mesh).mesh, t));
        append_mesh(scene.mesh, scene.objects.back());
    }
    scene.reference_vertex_count = scene.objects.front().vertex_count();
    return scene;
}

namespace {

/// Shortest wall time over `repetitions` runs of `work`.
template <typename Work>
double fastest_of(int repetitions, Work&& work) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::max(1, repetitions); ++i) {
        const auto start = Clock::now();
        const auto produced = work();
        const double seconds = seconds_since(start);
        if (produced > 0) {
            best = std::min(best, seconds);
        }
    }
    return std::isfinite(best) ? best : 0.0;
}

}  // namespace

GenerationBenchRow bench_generation(const BenchScene& scene, int objects, Method method,
                                    const GenerationBenchConfig& config) {
#ifdef __GLIBC__
    // Keep freed descriptor memory mapped so repeated runs time the kernels
    // rather than page faults on fresh allocations.
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
#endif
    GenerationBenchRow row;
    row.method = method;
    row.objects = objects;
    row.triangles = scene.mesh.triangle_count();
    const auto anchors = capped(unique_vertices(scene.mesh).points, config.max_anchors);
    row.descriptors = anchors.size();
    switch (method) {
        case Method::Rici: {
            const RiciGenerator gen(scene.mesh, config.support_radius, config.resolution);
            row.seconds = fastest_of(config.repetitions, [&] { return gen.generate_all(anchors).size(); });
            break;
        }
        case Method::SpinImage: {
            const auto samples = scene_samples(scene, config, "bench-si-samples");
            const SpinImageGenerator gen(samples, config.support_radius, config.resolution, std::nullopt);
            row.seconds = fastest_of(config.repetitions, [&] { return gen.generate_all(anchors).size(); });
            break;
        }
        case Method::ShapeContext: {
            const auto samples = scene_samples(scene, config, "bench-3dsc-samples");
            ShapeContextParams params;
            params.r_max = config.support_radius;
            const ShapeContextGenerator gen(samples, params, params.r_min);
            row.seconds = fastest_of(config.repetitions, [&] { return gen.generate_all(anchors).size(); });
            break;
        }
    }
    return row;
}

std::vector<MatchingBenchRow> bench_matching(const BenchScene& scene, const GenerationBenchConfig& config,
                                             std::size_t max_needles) {
    const TriangleMesh& reference = scene.objects.front();
    const auto reference_anchors = capped(unique_vertices(reference).points, max_needles);
    const auto scene_anchors = unique_vertices(scene.mesh).points;
    // The reference object comes first in the scene, so anchor i corresponds to scene anchor i.
    const std::size_t needles = reference_anchors.size();
    const std::size_t comparisons = needles * scene_anchors.size();
    std::vector<MatchingBenchRow> rows;

    {
        const auto needle_set = RiciGenerator(reference, config.support_radius, config.resolution)
                                    .generate_all(reference_anchors);
        const auto haystack = RiciGenerator(scene.mesh, config.support_radius, config.resolution)
                                  .generate_all(scene_anchors);
        MatchingBenchRow full{"crd-full", comparisons, 0, 0};
        auto start = Clock::now();
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < needles; ++i) {
            for (const auto& h : haystack) {
                sum += crd_distance(needle_set[i], h);
            }
        }
        full.seconds = seconds_since(start);
        full.checksum = double(sum);

        MatchingBenchRow early{"crd-early-exit", comparisons, 0, 0};
        start = Clock::now();
        std::uint64_t below = 0;
        for (std::size_t i = 0; i < needles; ++i) {
            const std::uint64_t truth = crd_distance(needle_set[i], haystack[i]);
            const std::uint64_t threshold = truth == 0 ? 0 : truth - 1;
            for (const auto& h : haystack) {
                below += crd_distance(needle_set[i], h, threshold) <= threshold ? 1 : 0;
            }
        }
        early.seconds = seconds_since(start);
        early.checksum = double(below);
        rows.push_back(full);
        rows.push_back(early);
    }
    {
        const SceneObject ref_object{&reference, 0};
        const SceneObject scene_object{&scene.mesh, 0};
        Prng ref_rng = Prng(config.seed).derive("bench-match-ref");
        Prng scene_rng = Prng(config.seed).derive("bench-match-scene");
        const auto ref_samples = sample_point_cloud(
            std::span(&ref_object, 1), static_cast<std::size_t>(config.samples_per_triangle) * reference.triangle_count(),
            ref_rng);
        const auto samples = sample_point_cloud(
            std::span(&scene_object, 1),
            static_cast<std::size_t>(config.samples_per_triangle) * scene.mesh.triangle_count(), scene_rng);

        std::vector<PreparedSpinImage> si_needles;
        for (const auto& d : SpinImageGenerator(ref_samples, config.support_radius, config.resolution, std::nullopt)
                                 .generate_all(reference_anchors)) {
            si_needles.emplace_back(d);
        }
        std::vector<PreparedSpinImage> si_haystack;
        for (const auto& d : SpinImageGenerator(samples, config.support_radius, config.resolution, std::nullopt)
                                 .generate_all(scene_anchors)) {
            si_haystack.emplace_back(d);
        }
        MatchingBenchRow pearson{"pearson", comparisons, 0, 0};
        auto start = Clock::now();
        double sum = 0.0;
        for (const auto& n : si_needles) {
            for (const auto& h : si_haystack) {
                sum += prepared_correlation(n, h);
            }
        }
        pearson.seconds = seconds_since(start);
        pearson.checksum = sum;
        rows.push_back(pearson);

        ShapeContextParams params;
        params.r_max = config.support_radius;
        std::vector<PreparedShapeContext> sc_needles;
        for (const auto& d : ShapeContextGenerator(ref_samples, params, params.r_min).generate_all(reference_anchors)) {
            sc_needles.emplace_back(d);
        }
        std::vector<PreparedShapeContext> sc_haystack;
        for (const auto& d : ShapeContextGenerator(samples, params, params.r_min).generate_all(scene_anchors)) {
            sc_haystack.emplace_back(d);
        }
        MatchingBenchRow sc{"3dsc", comparisons, 0, 0};
        start = Clock::now();
        sum = 0.0;
        for (const auto& n : sc_needles) {
            for (const auto& h : sc_haystack) {
                sum += prepared_shape_context_distance(n, h);
            }
        }
        sc.seconds = seconds_since(start);
        sc.checksum = sum;
        rows.push_back(sc);
    }
    return rows;
}

}  // namespace rici
