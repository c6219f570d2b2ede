#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oracles/oracles.hpp"
#include "rici/projection.hpp"
#include "rici/shape_context.hpp"
#include "rici/synthetic.hpp"
#include "support.hpp"

using namespace rici;

namespace {

ShapeContextDescriptor random_descriptor(Prng& rng, const ShapeContextParams& params) {
    ShapeContextDescriptor d(params);
    for (auto& v : d.bins) {
        v = rng.uniform() < 0.7 ? 0.0f : static_cast<float>(rng.uniform(0, 3));
    }
    return d;
}

ShapeContextDescriptor shifted(const ShapeContextDescriptor& d, int shift) {
    ShapeContextDescriptor out(d.params);
    const int J = d.params.azimuth_bins;
    for (int j = 0; j < J; ++j) {
        for (int k = 0; k < d.params.elevation_bins; ++k) {
            for (int l = 0; l < d.params.radial_bins; ++l) {
                out.bins[out.index(j, k, l)] = d.at((j + shift) % J, k, l);
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("radialBoundaries") {
    const auto b = radial_boundaries(0.048, 0.3, 12);
    REQUIRE(b.size() == 13);
    CHECK(b.front() == doctest::Approx(0.048).epsilon(1e-12));
    CHECK(b.back() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(b[6] == doctest::Approx(0.12).epsilon(1e-12));
    for (std::size_t i = 1; i < b.size(); ++i) {
        CHECK(b[i] > b[i - 1]);
    }
    const auto single = radial_boundaries(0.1, 0.7, 1);
    REQUIRE(single.size() == 2);
    CHECK(single[0] == 0.1);
    CHECK(single[1] == 0.7);
    CHECK_THROWS_AS(radial_boundaries(0.3, 0.048, 12), std::invalid_argument);
    CHECK_THROWS_AS(radial_boundaries(0.0, 0.3, 12), std::invalid_argument);
    CHECK_THROWS_AS(radial_boundaries(0.048, 0.3, 0), std::invalid_argument);
}

TEST_CASE("generateShapeContext: empty shell and on-axis sample") {
    const ShapeContextParams params;
    const OrientedPoint anchor{{0, 0, 0}, {0, 0, 1}};
    const std::vector<SampledPoint> outside = {{{0.01, 0, 0}, {0, 0, 1}, 0}, {{0.5, 0, 0}, {0, 0, 1}, 0}};
    const std::vector<std::uint32_t> ones = {1, 1};
    CHECK(generate_shape_context(outside, ones, anchor, params).bins == std::vector<float>(params.bin_count(), 0.0f));

    const SampledPoint on_axis{{0, 0, 0.1}, {0, 0, 1}, 0};
    const std::uint32_t one = 1;
    const auto d = generate_shape_context(std::span(&on_axis, 1), std::span(&one, 1), anchor, params);
    const auto boundaries = radial_boundaries(params.r_min, params.r_max, params.radial_bins);
    const double expected = 1.0 / std::cbrt(shape_context_bin_volume(params, boundaries, 0, 4));
    int nonzero = 0;
    for (int j = 0; j < params.azimuth_bins; ++j) {
        for (int k = 0; k < params.elevation_bins; ++k) {
            for (int l = 0; l < params.radial_bins; ++l) {
                if (d.at(j, k, l) != 0.0f) {
                    ++nonzero;
                    CHECK(k == 0);
                    CHECK(l == 4);
                    CHECK(d.at(j, k, l) == doctest::Approx(expected).epsilon(1e-6));
                }
            }
        }
    }
    CHECK(nonzero == 1);
}

TEST_CASE("shape context bin volumes fill the shell") {
    const ShapeContextParams params;
    const auto boundaries = radial_boundaries(params.r_min, params.r_max, params.radial_bins);
    double total = 0.0;
    for (int k = 0; k < params.elevation_bins; ++k) {
        for (int l = 0; l < params.radial_bins; ++l) {
            total += params.azimuth_bins * shape_context_bin_volume(params, boundaries, k, l);
        }
    }
    const double shell = 4.0 / 3.0 * std::numbers::pi * (std::pow(params.r_max, 3) - std::pow(params.r_min, 3));
    CHECK(total == doctest::Approx(shell).epsilon(1e-9));
}

TEST_CASE("shapeContextBin: indices are consistent with spherical coordinates") {
    const ShapeContextParams params;
    const auto boundaries = radial_boundaries(params.r_min, params.r_max, params.radial_bins);
    Prng rng(13);
    const double pi = std::numbers::pi;
    for (int i = 0; i < 100000; ++i) {
        const Vec3d p = test::random_unit(rng) * rng.uniform(0.0, 0.35);
        ShapeContextBin bin;
        const bool inside = shape_context_bin(p, params, boundaries, bin);
        const double d = length(p);
        CHECK(inside == (d > params.r_min && d <= params.r_max));
        if (!inside) {
            continue;
        }
        CHECK(boundaries[bin.radial] < d * (1 + 1e-12));
        CHECK(d <= boundaries[bin.radial + 1] * (1 + 1e-12));
        const double elevation = std::acos(std::clamp(p.z / d, -1.0, 1.0));
        CHECK(elevation >= bin.elevation * pi / params.elevation_bins - 1e-9);
        CHECK(elevation <= (bin.elevation + 1) * pi / params.elevation_bins + 1e-9);
        double azimuth = std::atan2(p.y, p.x);
        if (azimuth < 0) azimuth += 2 * pi;
        CHECK(azimuth >= bin.azimuth * 2 * pi / params.azimuth_bins - 1e-9);
        CHECK(azimuth <= (bin.azimuth + 1) * 2 * pi / params.azimuth_bins + 1e-9);
        ShapeContextBin again;
        REQUIRE(shape_context_bin(p, params, boundaries, again));
        CHECK(again.azimuth == bin.azimuth);
        CHECK(again.elevation == bin.elevation);
        CHECK(again.radial == bin.radial);
    }
    ShapeContextBin bin;
    CHECK_FALSE(shape_context_bin({params.r_min, 0, 0}, params, boundaries, bin));
    CHECK(shape_context_bin({params.r_max, 0, 0}, params, boundaries, bin));
    CHECK(bin.radial == params.radial_bins - 1);
}

TEST_CASE("generateShapeContext: uniform sphere shell is azimuthally flat") {
    const ShapeContextParams params;
    const OrientedPoint anchor{{0.3, -0.2, 0.1}, normalized(Vec3d{0.2, 0.5, -0.8})};
    Prng rng(99);
    ShapeContextDescriptor total(params);
    for (int chunk = 0; chunk < 8; ++chunk) {
        std::vector<SampledPoint> samples;
        for (int i = 0; i < 500000; ++i) {
            samples.push_back({anchor.position + test::random_unit(rng) * 0.2, {0, 0, 1}, 0});
        }
        const std::vector<std::uint32_t> ones(samples.size(), 1);
        const auto d = generate_shape_context(samples, ones, anchor, params);
        for (std::size_t b = 0; b < total.bins.size(); ++b) {
            total.bins[b] += d.bins[b];
        }
    }
    const auto boundaries = radial_boundaries(params.r_min, params.r_max, params.radial_bins);
    ShapeContextBin where;
    REQUIRE(shape_context_bin({0.2, 0, 0}, params, boundaries, where));
    for (int k = 0; k < params.elevation_bins; ++k) {
        double mean = 0.0;
        for (int j = 0; j < params.azimuth_bins; ++j) {
            mean += total.at(j, k, where.radial);
        }
        mean /= params.azimuth_bins;
        REQUIRE(mean > 0.0);
        for (int j = 0; j < params.azimuth_bins; ++j) {
            CHECK(std::abs(total.at(j, k, where.radial) - mean) <= 0.05 * mean);
        }
    }
}

TEST_CASE("generateShapeContext: density compensation under doubled sampling") {
    const ShapeContextParams params;
    const OrientedPoint anchor{{0, 0, 0}, {0, 0, 1}};
    const double h = 0.004;
    const double extent = params.r_max + 2 * params.r_min;
    std::vector<SampledPoint> sparse;
    std::vector<SampledPoint> dense;
    for (double x = -extent; x <= extent; x += h) {
        for (double y = -extent; y <= extent; y += h) {
            sparse.push_back({{x, y, 0}, {0, 0, 1}, 0});
            dense.push_back({{x, y, 0}, {0, 0, 1}, 0});
            dense.push_back({{x + 0.5 * h, y + 0.5 * h, 0}, {0, 0, 1}, 0});
        }
    }
    const auto a = generate_shape_context(sparse, anchor, params, params.r_min);
    const auto b = generate_shape_context(dense, anchor, params, params.r_min);
    const auto boundaries = radial_boundaries(params.r_min, params.r_max, params.radial_bins);
    int compared = 0;
    for (int j = 0; j < params.azimuth_bins; ++j) {
        for (int k = 0; k < params.elevation_bins; ++k) {
            for (int l = 0; l < params.radial_bins; ++l) {
                // Bins holding at least 100 sparse samples; smaller ones are dominated by lattice aliasing.
                const double area = 0.5 * (boundaries[l + 1] * boundaries[l + 1] - boundaries[l] * boundaries[l]) *
                                    (2 * std::numbers::pi / params.azimuth_bins);
                if (a.at(j, k, l) == 0.0f || area / (h * h) < 100) {
                    continue;
                }
                ++compared;
                CHECK(std::abs(b.at(j, k, l) - a.at(j, k, l)) <= 0.1 * a.at(j, k, l));
            }
        }
    }
    CHECK(compared >= params.azimuth_bins * 4);
}

TEST_CASE("shapeContextDistance: examples and properties") {
    const ShapeContextParams params;
    Prng rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_descriptor(rng, params);
        const auto b = random_descriptor(rng, params);
        CHECK(shape_context_distance(a, a) == doctest::Approx(0.0).scale(1).epsilon(1e-6));
        CHECK(shape_context_distance(a, shifted(a, 3)) <= 1e-6);
        CHECK(shape_context_distance(a, shifted(a, static_cast<int>(rng.below(15)))) <= 1e-6);
        const double ab = shape_context_distance(a, b);
        CHECK(std::abs(ab - oracle::shape_context_shift_minimum(a, b)) <= 1e-6);
        CHECK(std::abs(ab - shape_context_distance(b, a)) <= 1e-9);
        CHECK(std::abs(prepared_shape_context_distance(PreparedShapeContext(a), PreparedShapeContext(b)) - ab) <= 1e-6);
    }
    const ShapeContextDescriptor empty(params);
    const auto a = random_descriptor(rng, params);
    CHECK(shape_context_distance(empty, a) == doctest::Approx(1.0));
    CHECK(prepared_shape_context_distance(PreparedShapeContext(empty), PreparedShapeContext(a)) ==
          doctest::Approx(1.0));
    ShapeContextParams other = params;
    other.radial_bins = 6;
    CHECK_THROWS_AS(shape_context_distance(a, ShapeContextDescriptor(other)), std::invalid_argument);
}

TEST_CASE("ShapeContextGenerator equals generate_shape_context") {
    Prng rng(4);
    Prng shape = rng.derive("shape");
    const TriangleMesh blob = normalize_to_unit_sphere(lumpy_superellipsoid(shape)).mesh;
    const SceneObject object{&blob, 0};
    Prng sampling = rng.derive("samples");
    const auto samples = sample_point_cloud(std::span(&object, 1), 10 * blob.triangle_count(), sampling);
    const ShapeContextParams params;
    const ShapeContextGenerator gen(samples, params, params.r_min);
    const auto densities = local_densities(samples, params.r_min);
    REQUIRE(gen.densities().size() == samples.size());
    for (std::size_t i = 0; i < 200; ++i) {
        const std::size_t k = rng.below(samples.size());
        CHECK(gen.densities()[k] == densities[k]);
        std::uint32_t brute = 0;
        for (const auto& s : samples) {
            brute += length(s.position - samples[k].position) <= params.r_min ? 1 : 0;
        }
        CHECK(densities[k] == brute);
    }
    const auto anchors = unique_vertices(blob).points;
    std::vector<OrientedPoint> picked(anchors.begin(), anchors.begin() + 20);
    const auto all = gen.generate_all(picked);
    for (std::size_t i = 0; i < picked.size(); ++i) {
        CHECK(all[i].bins == generate_shape_context(samples, densities, picked[i], params).bins);
    }
}
