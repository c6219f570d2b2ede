#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles/oracles.hpp"
#include "rici/clutterbox.hpp"
#include "rici/errors.hpp"
#include "rici/synthetic.hpp"
#include "support.hpp"

using namespace rici;

namespace {

struct Corpus {
    test::TempDir dir{"corpus"};
    Corpus() { write_synthetic_corpus(dir.path(), 6, 77); }
};

const Corpus& corpus() {
    static const Corpus c;
    return c;
}

ClutterboxConfig small_config(Method method) {
    ClutterboxConfig config;
    config.seed = 42;
    config.method = method;
    config.object_counts = {1, 3};
    config.resolution = 32;
    config.samples_per_triangle = 4;
    config.clutter_samples = 2000;
    config.dataset = corpus().dir.path();
    return config;
}

std::size_t histogram_mass(const RankHistogram& h) {
    std::size_t total = 0;
    for (const auto& [rank, count] : h.counts) {
        total += count;
    }
    return total;
}

}  // namespace

TEST_CASE("parse_method") {
    CHECK(parse_method("rici") == Method::Rici);
    CHECK(parse_method("si") == Method::SpinImage);
    CHECK(parse_method("spin-image") == Method::SpinImage);
    CHECK(parse_method("3dsc") == Method::ShapeContext);
    CHECK(parse_method("shape-context") == Method::ShapeContext);
    CHECK_THROWS_AS(parse_method("fpfh"), std::invalid_argument);
}

TEST_CASE("rankDistances: best-tie rule") {
    const std::vector<int> refs = {0};
    const auto value = [](int, double d) { return d; };
    const std::vector<double> scene = {5, 2, 2, 9};
    // Nothing is strictly below 2, so the tied correspondent takes the best rank.
    CHECK(rank_distances<int, double>(refs, scene, std::vector<std::uint32_t>{1}, value)[0] == 0);
    CHECK(rank_distances<int, double>(refs, scene, std::vector<std::uint32_t>{2}, value)[0] == 0);
    CHECK(rank_distances<int, double>(refs, scene, std::vector<std::uint32_t>{0}, value)[0] == 2);
    const std::vector<double> with_better = {5, 1, 2, 2, 9};
    CHECK(rank_distances<int, double>(refs, with_better, std::vector<std::uint32_t>{2}, value)[0] == 1);
    CHECK(rank_distances<int, double>(refs, scene, std::vector<std::uint32_t>{1}, value, RankOrder::HigherIsBetter)[0] ==
          2);
}

TEST_CASE("rankDistances: agrees with the sort oracle") {
    Prng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t size = 1 + rng.below(40);
        std::vector<double> scene(size);
        for (auto& d : scene) {
            d = static_cast<double>(rng.below(10));
        }
        const std::vector<int> refs = {0};
        const std::uint32_t truth = static_cast<std::uint32_t>(rng.below(size));
        const auto value = [](int, double d) { return d; };
        for (const auto order : {RankOrder::LowerIsBetter, RankOrder::HigherIsBetter}) {
            const auto ranks = rank_distances<int, double>(refs, scene, std::vector<std::uint32_t>{truth}, value, order);
            CHECK(ranks[0] == oracle::rank_by_sort(scene, scene[truth], order == RankOrder::LowerIsBetter));
        }
    }
}

TEST_CASE("rank_rici equals exhaustive CRD ranking") {
    Prng rng(10);
    const auto random_rici = [&] {
        RiciDescriptor d(8, 1.0);
        for (auto& v : d.bins) {
            v = static_cast<std::uint32_t>(rng.below(4));
        }
        return d;
    };
    std::vector<RiciDescriptor> refs;
    std::vector<RiciDescriptor> scene;
    for (int i = 0; i < 30; ++i) refs.push_back(random_rici());
    // Every scene entry is a noisy copy of some reference, so correspondents compete with siblings.
    std::vector<std::uint32_t> correspondence;
    for (int i = 0; i < 90; ++i) {
        RiciDescriptor copy = refs[static_cast<std::size_t>(i % 30)];
        const auto noise = rng.below(12);
        for (std::uint64_t k = 0; k < noise; ++k) {
            copy.bins[rng.below(copy.bins.size())] += 1;
        }
        scene.push_back(copy);
    }
    for (std::size_t i = 0; i < refs.size(); ++i) {
        correspondence.push_back(static_cast<std::uint32_t>(i));
    }
    const auto expected = rank_distances<RiciDescriptor, RiciDescriptor>(
        refs, scene, correspondence, [](const RiciDescriptor& a, const RiciDescriptor& b) { return crd_distance(a, b); });
    CHECK(rank_rici(refs, scene, correspondence) == expected);
    std::size_t nonzero = 0;
    for (const auto r : expected) nonzero += r > 0 ? 1 : 0;
    CHECK(nonzero > 5);
}

TEST_CASE("estimateClutterFraction") {
    const TriangleMesh sphere = icosphere(3);
    const OrientedPoint anchor{sphere.vertices[0], sphere.normals[0]};

    const SceneObject alone[] = {{&sphere, 0}};
    CHECK(estimate_clutter_fraction(alone, anchor, 0, 0.3, 1000, Prng(1)) == 0.0);

    const SceneObject twins[] = {{&sphere, 0}, {&sphere, 1}};
    const double half = estimate_clutter_fraction(twins, anchor, 0, 0.3, 100000, Prng(2));
    CHECK(std::abs(half - 0.5) <= 0.02);
    const double half_ball = estimate_clutter_fraction(twins, anchor, 0, 0.3, 100000, Prng(2), SupportVolume::Sphere);
    CHECK(std::abs(half_ball - 0.5) <= 0.02);

    const TriangleMesh far = apply_transform(sphere, RigidTransform::from_axis_angle({0, 0, 1}, 0, {10, 0, 0}));
    const SceneObject distant[] = {{&sphere, 0}, {&far, 1}};
    CHECK(estimate_clutter_fraction(distant, anchor, 0, 0.3, 1000, Prng(3)) == 0.0);

    const OrientedPoint empty_space{{50, 50, 50}, {0, 0, 1}};
    CHECK(estimate_clutter_fraction(twins, empty_space, 0, 0.3, 1000, Prng(4)) == 0.0);
    CHECK_THROWS_AS(estimate_clutter_fraction(twins, anchor, 0, 0.3, 0, Prng(4)), std::invalid_argument);
}

TEST_CASE("estimateClutterFraction: standard error shrinks with the square root of the sample count") {
    const TriangleMesh sphere = icosphere(3);
    const TriangleMesh offset = apply_transform(sphere, RigidTransform::from_axis_angle({1, 0, 0}, 30, {0.1, 0, 0}));
    const SceneObject scene[] = {{&sphere, 0}, {&offset, 1}};
    const OrientedPoint anchor{sphere.vertices[5], sphere.normals[5]};
    const auto spread = [&](std::size_t samples) {
        const int runs = 200;
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int i = 0; i < runs; ++i) {
            const double v = estimate_clutter_fraction(scene, anchor, 0, 0.3, samples, Prng(1000 + i));
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / runs;
        return std::sqrt(std::max(0.0, sum_sq / runs - mean * mean));
    };
    const double coarse = spread(500);
    const double fine = spread(2000);
    REQUIRE(coarse > 0.0);
    // Four times the samples: half the standard error, within statistical noise.
    CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("ClutterboxConfig::validate") {
    ClutterboxConfig config;
    CHECK_NOTHROW(config.validate());
    config.object_counts = {2, 5};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.object_counts = {1, 5, 5};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.object_counts = {1, 5};
    config.box_side = 1.5;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.box_side = 3;
    config.support_angle_degrees = 190;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.support_angle_degrees.reset();
    CHECK(config.effective_shape_context().r_max == config.support_radius);
}

TEST_CASE("runClutterbox: uncluttered self-match with identity placement") {
    ClutterboxConfig config = small_config(Method::Rici);
    config.object_counts = {1};
    config.identity_reference_placement = true;
    const ClutterboxResult result = run_clutterbox(config);
    REQUIRE(result.levels.size() == 1);
    const auto& h = result.levels[0].histogram;
    CHECK(h.counts.size() == 1);
    CHECK(h.counts.at(0) == result.reference_descriptor_count);
    CHECK(h.total_queries == result.reference_descriptor_count);
    for (const auto& r : result.levels[0].records) {
        CHECK(r.clutter_fraction == 0.0);
    }
}

TEST_CASE("runClutterbox: determinism, incremental scenes, shared scenes across methods") {
    const ClutterboxResult a = run_clutterbox(small_config(Method::Rici));
    const ClutterboxResult b = run_clutterbox(small_config(Method::Rici));
    REQUIRE(a.levels.size() == 2);
    CHECK(a.selected_meshes.size() == 3);
    CHECK(a.placements.size() == 3);
    CHECK(a.reference_mesh == a.placements[0].mesh);
    for (std::size_t l = 0; l < a.levels.size(); ++l) {
        CHECK(a.levels[l].histogram.counts == b.levels[l].histogram.counts);
        CHECK(histogram_mass(a.levels[l].histogram) == a.levels[l].histogram.total_queries);
        CHECK(a.levels[l].histogram.total_queries == a.reference_descriptor_count);
        REQUIRE(a.levels[l].records.size() == b.levels[l].records.size());
        for (std::size_t i = 0; i < a.levels[l].records.size(); ++i) {
            CHECK(a.levels[l].records[i].rank == b.levels[l].records[i].rank);
            CHECK(a.levels[l].records[i].clutter_fraction == b.levels[l].records[i].clutter_fraction);
            CHECK(a.levels[l].records[i].rank < a.levels[l].scene_descriptor_count);
        }
    }
    CHECK(a.levels[1].scene_descriptor_count > a.levels[0].scene_descriptor_count);
    for (const auto& r : a.levels[0].records) {
        CHECK(r.clutter_fraction == 0.0);
    }

    // The scene at count 1 is the first placement of the larger run.
    ClutterboxConfig only_one = small_config(Method::Rici);
    only_one.object_counts = {1};
    const ClutterboxResult single = run_clutterbox(only_one);
    CHECK(single.placements.size() == 1);
    CHECK(single.levels[0].histogram.counts == a.levels[0].histogram.counts);

    for (const Method m : {Method::SpinImage, Method::ShapeContext}) {
        const ClutterboxResult other = run_clutterbox(small_config(m));
        CHECK(other.selected_meshes == a.selected_meshes);
        CHECK(other.reference_mesh == a.reference_mesh);
        REQUIRE(other.placements.size() == a.placements.size());
        for (std::size_t i = 0; i < a.placements.size(); ++i) {
            CHECK(other.placements[i].mesh == a.placements[i].mesh);
            CHECK(other.placements[i].transform.w == a.placements[i].transform.w);
            CHECK(other.placements[i].transform.translation.x == a.placements[i].transform.translation.x);
        }
        CHECK(other.reference_descriptor_count == a.reference_descriptor_count);
    }
}

TEST_CASE("runClutterbox: dataset errors") {
    ClutterboxConfig config = small_config(Method::Rici);
    config.object_counts = {1, 10};
    CHECK_THROWS_AS(run_clutterbox(config), DataError);
    config.dataset = corpus().dir.path() / "missing";
    CHECK_THROWS_AS(run_clutterbox(config), DataError);

    test::TempDir broken("broken_corpus");
    write_synthetic_corpus(broken.path(), 3, 5);
    test::write_text(broken / "zz_bad.obj", "v 0 0 0\n");
    ClutterboxConfig skip = small_config(Method::Rici);
    skip.dataset = broken.path();
    skip.object_counts = {1, 3};
    // With four files, three of them loadable, a draw of the bad one is skipped and resampled.
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        skip.seed = seed;
        const ClutterboxResult r = run_clutterbox(skip);
        CHECK(r.selected_meshes.size() == 3);
        for (const auto& name : r.selected_meshes) {
            CHECK(name != "zz_bad.obj");
        }
    }
}

TEST_CASE("supportAngleAblation") {
    ClutterboxConfig config = small_config(Method::SpinImage);
    config.object_counts = {1, 2};
    const ClutterboxResult baseline = run_clutterbox(config);
    const std::vector<double> angles = {60.0, 180.0};
    const auto runs = run_support_angle_ablation(config, angles);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].first == 60.0);
    CHECK(runs[1].first == 180.0);
    for (std::size_t l = 0; l < baseline.levels.size(); ++l) {
        CHECK(runs[1].second.levels[l].histogram.counts == baseline.levels[l].histogram.counts);
    }
    CHECK(runs[0].second.placements.size() == runs[1].second.placements.size());
    CHECK(runs[0].second.reference_mesh == runs[1].second.reference_mesh);
    CHECK_THROWS_AS(run_support_angle_ablation(small_config(Method::Rici), angles), std::invalid_argument);
}
