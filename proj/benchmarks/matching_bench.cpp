#include <benchmark/benchmark.h>

#include <vector>

#include "rici/rici_descriptor.hpp"
#include "rici/shape_context.hpp"
#include "rici/spin_image.hpp"
#include "rici/throughput.hpp"

using namespace rici;

namespace {

constexpr double kRadius = 0.3;
constexpr int kResolution = 64;
constexpr std::size_t kNeedles = 16;
constexpr std::size_t kHaystack = 512;

std::vector<OrientedPoint> spread(const std::vector<OrientedPoint>& points, std::size_t count) {
    std::vector<OrientedPoint> out;
    for (std::size_t i = 0; i < points.size() && out.size() < count; i += points.size() / count + 1) {
        out.push_back(points[i]);
    }
    return out;
}

// Reference descriptors against scene descriptors of a 5-object scene.
struct Fixture {
    std::vector<RiciDescriptor> needles;
    std::vector<RiciDescriptor> haystack;
    std::vector<std::uint64_t> thresholds;
    std::vector<SpinImageDescriptor> si_needles;
    std::vector<SpinImageDescriptor> si_haystack;
    std::vector<ShapeContextDescriptor> sc_needles;
    std::vector<ShapeContextDescriptor> sc_haystack;

    Fixture() {
        const BenchScene scene = synthetic_bench_scene(5, 42);
        const auto needle_points = spread(unique_vertices(scene.objects.front()).points, kNeedles);
        const auto scene_points = spread(unique_vertices(scene.mesh).points, kHaystack);

        const RiciGenerator rici(scene.mesh, kRadius, kResolution);
        needles = rici.generate_all(needle_points);
        haystack = rici.generate_all(scene_points);
        for (const auto& n : needles) {
            // Correspondent distance is 0 for an exact copy; use a typical near-miss instead.
            thresholds.push_back(crd_distance(n, haystack[haystack.size() / 2]) / 4);
        }

        const SceneObject object{&scene.mesh, 0};
        Prng rng(3);
        const auto samples = sample_point_cloud(std::span(&object, 1), 10 * scene.mesh.triangle_count(), rng);
        const SpinImageGenerator si(samples, kRadius, kResolution);
        si_needles = si.generate_all(needle_points);
        si_haystack = si.generate_all(scene_points);
        ShapeContextParams params;
        params.r_max = kRadius;
        const ShapeContextGenerator sc(samples, params, params.r_min);
        sc_needles = sc.generate_all(needle_points);
        sc_haystack = sc.generate_all(std::vector<OrientedPoint>(scene_points.begin(), scene_points.begin() + 64));
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_CrdFull(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        std::uint64_t sum = 0;
        for (const auto& n : f.needles) {
            for (const auto& h : f.haystack) {
                sum += crd_distance(n, h);
            }
        }
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.needles.size() * f.haystack.size()));
}
BENCHMARK(BM_CrdFull)->Unit(benchmark::kMillisecond);

void BM_CrdEarlyExit(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < f.needles.size(); ++i) {
            for (const auto& h : f.haystack) {
                sum += crd_distance(f.needles[i], h, f.thresholds[i]);
            }
        }
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.needles.size() * f.haystack.size()));
}
BENCHMARK(BM_CrdEarlyExit)->Unit(benchmark::kMillisecond);

void BM_SparseCrdEarlyExit(benchmark::State& state) {
    const Fixture& f = fixture();
    std::vector<SparseCrdNeedle> sparse(f.needles.begin(), f.needles.end());
    for (auto _ : state) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < sparse.size(); ++i) {
            for (const auto& h : f.haystack) {
                sum += sparse[i].distance(h, f.thresholds[i]);
            }
        }
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.needles.size() * f.haystack.size()));
}
BENCHMARK(BM_SparseCrdEarlyExit)->Unit(benchmark::kMillisecond);

void BM_Pearson(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        double sum = 0;
        for (const auto& n : f.si_needles) {
            for (const auto& h : f.si_haystack) {
                sum += pearson_distance(n, h);
            }
        }
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(
        static_cast<std::int64_t>(state.iterations() * f.si_needles.size() * f.si_haystack.size()));
}
BENCHMARK(BM_Pearson)->Unit(benchmark::kMillisecond);

void BM_ShapeContextDistance(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        double sum = 0;
        for (const auto& n : f.sc_needles) {
            for (const auto& h : f.sc_haystack) {
                sum += shape_context_distance(n, h);
            }
        }
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(
        static_cast<std::int64_t>(state.iterations() * f.sc_needles.size() * f.sc_haystack.size()));
}
BENCHMARK(BM_ShapeContextDistance)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
