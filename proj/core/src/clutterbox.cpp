#include "rici/clutterbox.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "rici/errors.hpp"
#include "rici/mesh_io.hpp"
#include "rici/projection.hpp"
#include "rici/spin_image.hpp"

namespace rici {

std::string to_string(Method method) {
    switch (method) {
        case Method::Rici:
            return "rici";
        case Method::SpinImage:
            return "si";
        case Method::ShapeContext:
            return "3dsc";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "rici") return Method::Rici;
    if (name == "si" || name == "spin-image") return Method::SpinImage;
    if (name == "3dsc" || name == "shape-context") return Method::ShapeContext;
    throw std::invalid_argument("unknown method '" + name + "' (expected rici, si or 3dsc)");
}

void ClutterboxConfig::validate() const {
    if (object_counts.empty() || object_counts.front() != 1) {
        throw std::invalid_argument("object counts must start with 1");
    }
    for (std::size_t i = 1; i < object_counts.size(); ++i) {
        if (object_counts[i] <= object_counts[i - 1]) {
            throw std::invalid_argument("object counts must be strictly increasing");
        }
    }
    if (!(box_side >= 2.0)) {
        throw std::invalid_argument("clutterbox side must be at least 2 to hold a unit sphere");
    }
    if (!(support_radius > 0.0)) {
        throw std::invalid_argument("support radius must be positive");
    }
    if (resolution < 2) {
        throw std::invalid_argument("resolution must be at least 2");
    }
    if (samples_per_triangle < 1) {
        throw std::invalid_argument("samples per triangle must be >= 1");
    }
    if (support_angle_degrees && (*support_angle_degrees < 0.0 || *support_angle_degrees > 180.0)) {
        throw std::invalid_argument("support angle must lie in [0, 180] degrees");
    }
    effective_shape_context().validate();
}

ShapeContextParams ClutterboxConfig::effective_shape_context() const {
    ShapeContextParams p = shape_context;
    p.r_max = support_radius;
    return p;
}

std::vector<std::filesystem::path> list_dataset(const std::filesystem::path& directory) {
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec)) {
        throw DataError("dataset directory not found: " + directory.string());
    }
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && format_from_extension(entry.path())) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> rank_rici(std::span<const RiciDescriptor> references,
                                   std::span<const RiciDescriptor> scene,
                                   std::span<const std::uint32_t> correspondence) {
    std::vector<std::size_t> ranks(references.size(), 0);
    parallel_for(references.size(), [&](std::size_t i) {
        const SparseCrdNeedle needle(references[i]);
        const std::uint64_t truth = needle.distance(scene[correspondence[i]]);
        if (truth == 0) {
            return;  // nothing can be strictly better than zero
        }
        const std::uint64_t threshold = truth - 1;
        std::size_t better = 0;
        for (const auto& haystack : scene) {
            if (needle.distance(haystack, threshold) <= threshold) {
                ++better;
            }
        }
        ranks[i] = better;
    });
    return ranks;
}

double estimate_clutter_fraction(std::span<const SceneObject> scene, const OrientedPoint& anchor,
                                 std::int32_t reference_object_id, double support_radius,
                                 std::size_t mc_samples, Prng rng, SupportVolume volume) {
    if (mc_samples == 0) {
        throw std::invalid_argument("estimate_clutter_fraction: mc_samples must be >= 1");
    }
    const double reach = (volume == SupportVolume::Cylinder ? std::sqrt(1.25) : 1.0) * support_radius;
    const Vec3d& c = anchor.position;

    struct Candidate {
        Vec3d a, b, e;
        std::int32_t object_id;
    };
    std::vector<Candidate> candidates;
    std::vector<double> cumulative;
    double total = 0.0;
    for (const auto& object : scene) {
        const TriangleMesh& mesh = *object.mesh;
        for (const auto& tri : mesh.triangles) {
            const Vec3d& a = mesh.vertices[tri[0]];
            const Vec3d& b = mesh.vertices[tri[1]];
            const Vec3d& e = mesh.vertices[tri[2]];
            // Box-vs-ball rejection.
            double d2 = 0.0;
            for (int axis = 0; axis < 3; ++axis) {
                const double lo = std::min({a[axis], b[axis], e[axis]});
                const double hi = std::max({a[axis], b[axis], e[axis]});
                const double v = c[axis] < lo ? lo - c[axis] : (c[axis] > hi ? c[axis] - hi : 0.0);
                d2 += v * v;
            }
            if (d2 > reach * reach) {
                continue;
            }
            const double area = triangle_area(a, b, e);
            if (!(area > 0.0)) {
                continue;
            }
            total += area;
            candidates.push_back({a, b, e, object.object_id});
            cumulative.push_back(total);
        }
    }
    if (candidates.empty()) {
        return 0.0;
    }

    const ProjectionBasis<double> basis = build_basis<double>(anchor);
    const double half = 0.5 * support_radius;
    std::size_t inside_all = 0;
    std::size_t inside_object = 0;
    for (std::size_t i = 0; i < mc_samples; ++i) {
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), rng.uniform() * total);
        if (it == cumulative.end()) {
            --it;
        }
        const Candidate& t = candidates[static_cast<std::size_t>(it - cumulative.begin())];
        const double su = std::sqrt(rng.uniform());
        const double v = rng.uniform();
        const Vec3d p = t.a * (1.0 - su) + t.b * (su * (1.0 - v)) + t.e * (su * v);
        bool inside = false;
        if (volume == SupportVolume::Cylinder) {
            const CylindricalCoord<double> cc = basis.project(p);
            inside = cc.alpha <= support_radius && std::abs(cc.beta) <= half;
        } else {
            inside = squared_length(p - c) <= support_radius * support_radius;
        }
        if (inside) {
            ++inside_all;
            if (t.object_id == reference_object_id) {
                ++inside_object;
            }
        }
    }
    if (inside_all == 0) {
        return 0.0;
    }
    return double(inside_all - inside_object) / double(inside_all);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct LoadedObject {
    std::string name;
    TriangleMesh mesh;  // normalized to the unit sphere
};

std::vector<LoadedObject> select_objects(const ClutterboxConfig& config, const Prng& root,
                                         std::vector<std::string>& warnings) {
    const auto files = list_dataset(config.dataset);
    const auto needed = static_cast<std::size_t>(config.object_counts.back());
    if (files.size() < needed) {
        throw DataError("dataset has " + std::to_string(files.size()) + " meshes, " +
                        std::to_string(needed) + " required");
    }
    // Lazy Fisher-Yates: unloadable files are skipped and replaced by the next draw.
    std::vector<std::size_t> order(files.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    Prng rng = root.derive("select");
    std::vector<LoadedObject> out;
    for (std::size_t i = 0; i < order.size() && out.size() < needed; ++i) {
        std::swap(order[i], order[i + rng.below(order.size() - i)]);
        const auto& path = files[order[i]];
        try {
            LoadedMesh loaded = load_mesh(path);
            out.push_back({path.filename().string(), normalize_to_unit_sphere(loaded.mesh).mesh});
        } catch (const DataError& e) {
            warnings.push_back("skipped " + path.filename().string() + ": " + e.what());
        }
    }
    if (out.size() < needed) {
        throw DataError("dataset has only " + std::to_string(out.size()) + " loadable meshes, " +
                        std::to_string(needed) + " required");
    }
    return out;
}

struct SceneLevel {
    TriangleMesh mesh;
    std::vector<SceneObject> objects;
};

/// Correspondence from reference anchors to scene anchors. The reference
/// object is always placed first, so its vertices keep their indices in the
/// combined mesh.
std::vector<std::uint32_t> correspondence_for(const UniqueVertices& reference,
                                              const UniqueVertices& scene) {
    std::vector<std::uint32_t> first_vertex(reference.points.size(), UINT32_MAX);
    for (std::size_t v = 0; v < reference.vertex_to_unique.size(); ++v) {
        auto& slot = first_vertex[reference.vertex_to_unique[v]];
        if (slot == UINT32_MAX) {
            slot = static_cast<std::uint32_t>(v);
        }
    }
    std::vector<std::uint32_t> out(first_vertex.size());
    for (std::size_t u = 0; u < first_vertex.size(); ++u) {
        out[u] = scene.vertex_to_unique[first_vertex[u]];
    }
    return out;
}

std::size_t sample_count(const ClutterboxConfig& config, std::size_t triangles) {
    return static_cast<std::size_t>(config.samples_per_triangle) * triangles;
}

}  // namespace

ClutterboxResult run_clutterbox(const ClutterboxConfig& config) {
    config.validate();
    const Prng root(config.seed);
    ClutterboxResult result;
    result.config = config;

    std::vector<LoadedObject> objects = select_objects(config, root, result.warnings);
    for (const auto& o : objects) {
        result.selected_meshes.push_back(o.name);
    }
    const std::size_t n = objects.size();
    Prng reference_rng = root.derive("reference");
    const std::size_t reference_index = reference_rng.below(n);
    result.reference_mesh = objects[reference_index].name;

    // Placement order: reference first, the others shuffled.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        if (i != reference_index) {
            order.push_back(i);
        }
    }
    Prng order_rng = root.derive("order");
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[order_rng.below(i)]);
    }
    order.insert(order.begin(), reference_index);

    const double lo = 1.0;
    const double hi = config.box_side - 1.0;
    std::vector<TriangleMesh> placed;
    placed.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Prng placement_rng = root.derive("placement", k);
        const Vec3d center{placement_rng.uniform(lo, hi), placement_rng.uniform(lo, hi),
                           placement_rng.uniform(lo, hi)};
        RigidTransform t = RigidTransform::random_rotation(placement_rng, center);
        if (k == 0 && config.identity_reference_placement) {
            t = RigidTransform::identity();
        }
        placed.push_back(apply_transform(objects[order[k]].mesh, t));
        result.placements.push_back({objects[order[k]].name, static_cast<int>(k), t});
    }

    // Reference descriptors on the untransformed, normalized reference object.
    const TriangleMesh& reference_mesh = objects[reference_index].mesh;
    const UniqueVertices reference_anchors = unique_vertices(reference_mesh);
    result.reference_descriptor_count = reference_anchors.points.size();
    const ShapeContextParams sc_params = config.effective_shape_context();
    const double density_radius = config.local_density_radius > 0.0 ? config.local_density_radius
                                                                     : sc_params.r_min;

    std::vector<RiciDescriptor> reference_rici;
    std::vector<PreparedSpinImage> reference_si;
    std::vector<PreparedShapeContext> reference_sc;
    {
        const auto start = Clock::now();
        const SceneObject ref_object{&reference_mesh, 0};
        switch (config.method) {
            case Method::Rici: {
                const RiciGenerator gen(reference_mesh, config.support_radius, config.resolution);
                reference_rici = gen.generate_all(reference_anchors.points);
                break;
            }
            case Method::SpinImage: {
                Prng rng = root.derive("reference-samples");
                const auto samples = sample_point_cloud(
                    std::span(&ref_object, 1), sample_count(config, reference_mesh.triangle_count()),
                    rng, config.sampling_mode);
                const SpinImageGenerator gen(samples, config.support_radius, config.resolution,
                                             config.support_angle_degrees);
                for (const auto& d : gen.generate_all(reference_anchors.points)) {
                    reference_si.emplace_back(d);
                }
                break;
            }
            case Method::ShapeContext: {
                Prng rng = root.derive("reference-samples");
                const auto samples = sample_point_cloud(
                    std::span(&ref_object, 1), sample_count(config, reference_mesh.triangle_count()),
                    rng, config.sampling_mode);
                const ShapeContextGenerator gen(samples, sc_params, density_radius);
                for (const auto& d : gen.generate_all(reference_anchors.points)) {
                    reference_sc.emplace_back(d);
                }
                break;
            }
        }
        result.reference_generation_seconds = seconds_since(start);
    }

    for (const int count : config.object_counts) {
        SceneLevel scene;
        for (int k = 0; k < count; ++k) {
            append_mesh(scene.mesh, placed[static_cast<std::size_t>(k)]);
            scene.objects.push_back({&placed[static_cast<std::size_t>(k)], k});
        }
        const UniqueVertices scene_anchors = unique_vertices(scene.mesh);
        const auto correspondence = correspondence_for(reference_anchors, scene_anchors);

        LevelResult level;
        level.histogram.clutter_object_count = count;
        level.scene_descriptor_count = scene_anchors.points.size();
        std::vector<std::size_t> ranks;

        auto start = Clock::now();
        switch (config.method) {
            case Method::Rici: {
                const RiciGenerator gen(scene.mesh, config.support_radius, config.resolution);
                const auto scene_descriptors = gen.generate_all(scene_anchors.points);
                level.generation_seconds = seconds_since(start);
                start = Clock::now();
                ranks = rank_rici(reference_rici, scene_descriptors, correspondence);
                break;
            }
            case Method::SpinImage: {
                Prng rng = root.derive("scene-samples", static_cast<std::uint64_t>(count));
                const auto samples = sample_point_cloud(
                    scene.objects, sample_count(config, scene.mesh.triangle_count()), rng,
                    config.sampling_mode);
                const SpinImageGenerator gen(samples, config.support_radius, config.resolution,
                                             config.support_angle_degrees);
                std::vector<PreparedSpinImage> scene_descriptors;
                for (const auto& d : gen.generate_all(scene_anchors.points)) {
                    scene_descriptors.emplace_back(d);
                }
                level.generation_seconds = seconds_since(start);
                start = Clock::now();
                ranks = rank_distances<PreparedSpinImage, PreparedSpinImage>(
                    reference_si, scene_descriptors, correspondence,
                    [](const PreparedSpinImage& a, const PreparedSpinImage& b) {
                        return prepared_correlation(a, b);
                    },
                    RankOrder::HigherIsBetter);
                break;
            }
            case Method::ShapeContext: {
                Prng rng = root.derive("scene-samples", static_cast<std::uint64_t>(count));
                const auto samples = sample_point_cloud(
                    scene.objects, sample_count(config, scene.mesh.triangle_count()), rng,
                    config.sampling_mode);
                const ShapeContextGenerator gen(samples, sc_params, density_radius);
                std::vector<PreparedShapeContext> scene_descriptors;
                for (const auto& d : gen.generate_all(scene_anchors.points)) {
                    scene_descriptors.emplace_back(d);
                }
                level.generation_seconds = seconds_since(start);
                start = Clock::now();
                ranks = rank_distances<PreparedShapeContext, PreparedShapeContext>(
                    reference_sc, scene_descriptors, correspondence,
                    [](const PreparedShapeContext& a, const PreparedShapeContext& b) {
                        return prepared_shape_context_distance(a, b);
                    });
                break;
            }
        }
        level.comparison_seconds = seconds_since(start);

        level.records.resize(ranks.size());
        const SupportVolume volume =
            config.method == Method::ShapeContext ? SupportVolume::Sphere : SupportVolume::Cylinder;
        const Prng clutter_root = root.derive("clutter", static_cast<std::uint64_t>(count));
        parallel_for(ranks.size(), [&](std::size_t i) {
            VertexClutterRecord& record = level.records[i];
            record.vertex_id = static_cast<std::uint32_t>(i);
            record.rank = ranks[i];
            if (config.clutter_samples > 0 && count > 1) {
                record.clutter_fraction = estimate_clutter_fraction(
                    scene.objects, scene_anchors.points[correspondence[i]], 0, config.support_radius,
                    config.clutter_samples, clutter_root.derive("vertex", i), volume);
            }
        });
        for (const auto rank : ranks) {
            level.histogram.add(rank);
        }
        result.levels.push_back(std::move(level));
    }
    return result;
}

std::vector<std::pair<double, ClutterboxResult>> run_support_angle_ablation(
    const ClutterboxConfig& config, std::span<const double> angles_degrees) {
    if (config.method != Method::SpinImage) {
        throw std::invalid_argument("support angle ablation requires the spin image method");
    }
    std::vector<std::pair<double, ClutterboxResult>> out;
    for (const double angle : angles_degrees) {
        ClutterboxConfig c = config;
        c.support_angle_degrees = angle;
        out.emplace_back(angle, run_clutterbox(c));
    }
    return out;
}

}  // namespace rici
