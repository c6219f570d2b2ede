#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rici/mesh.hpp"
#include "rici/parallel.hpp"
#include "rici/prng.hpp"
#include "rici/rici_descriptor.hpp"
#include "rici/shape_context.hpp"

namespace rici {

enum class Method { Rici, SpinImage, ShapeContext };

std::string to_string(Method method);
/// Accepts rici, si / spin-image, 3dsc / shape-context. Throws std::invalid_argument.
Method parse_method(const std::string& name);

struct ClutterboxConfig {
    std::uint64_t seed{0};
    double box_side{3.0};
    std::vector<int> object_counts{1, 5, 10};
    Method method{Method::Rici};
    double support_radius{0.3};
    /// RICI and spin image resolution (N x N).
    int resolution{64};
    /// r_max is forced to support_radius.
    ShapeContextParams shape_context{};
    /// Neighbourhood radius for 3DSC density weighting; 0 means r_min.
    double local_density_radius{0.0};
    int samples_per_triangle{10};
    SamplingMode sampling_mode{SamplingMode::AreaWeighted};
    std::optional<double> support_angle_degrees;
    std::filesystem::path dataset;
    /// Debug: leave the reference object at the origin, untransformed.
    bool identity_reference_placement{false};
    /// Monte-Carlo samples per reference vertex for clutter estimation; 0 disables.
    std::size_t clutter_samples{10000};

    /// Throws std::invalid_argument describing the first problem.
    void validate() const;
    ShapeContextParams effective_shape_context() const;
};

struct RankHistogram {
    int clutter_object_count{0};
    std::map<std::size_t, std::size_t> counts;
    std::size_t total_queries{0};

    void add(std::size_t rank) {
        ++counts[rank];
        ++total_queries;
    }
    double rank0_fraction() const {
        const auto it = counts.find(0);
        return total_queries == 0 || it == counts.end() ? 0.0
                                                        : double(it->second) / double(total_queries);
    }
};

struct VertexClutterRecord {
    std::uint32_t vertex_id{0};
    double clutter_fraction{0};
    std::size_t rank{0};
};

struct Placement {
    std::string mesh;
    int object_id{0};
    RigidTransform transform;
};

struct LevelResult {
    RankHistogram histogram;
    std::vector<VertexClutterRecord> records;
    std::size_t scene_descriptor_count{0};
    double generation_seconds{0};
    double comparison_seconds{0};
};

struct ClutterboxResult {
    ClutterboxConfig config;
    std::vector<std::string> selected_meshes;
    std::string reference_mesh;
    std::vector<Placement> placements;
    std::size_t reference_descriptor_count{0};
    double reference_generation_seconds{0};
    std::vector<LevelResult> levels;
    std::vector<std::string> warnings;
};

/// Sorted list of .obj / .ply files directly inside `directory`.
std::vector<std::filesystem::path> list_dataset(const std::filesystem::path& directory);

/// Runs one clutterbox experiment. Every random choice derives from
/// config.seed, so results do not depend on thread count.
/// Throws DataError when the dataset cannot supply enough loadable meshes.
ClutterboxResult run_clutterbox(const ClutterboxConfig& config);

/// Same scenes for every angle; only the spin image support-angle filter varies.
std::vector<std::pair<double, ClutterboxResult>> run_support_angle_ablation(
    const ClutterboxConfig& config, std::span<const double> angles_degrees);

enum class RankOrder { LowerIsBetter, HigherIsBetter };

/// Rank of each reference descriptor's true correspondent among all scene
/// descriptors: the number of scene descriptors whose distance is strictly
/// better. Ties therefore share the best rank.
template <typename Reference, typename Scene, typename Distance>
std::vector<std::size_t> rank_distances(std::span<const Reference> references,
                                        std::span<const Scene> scene,
                                        std::span<const std::uint32_t> correspondence,
                                        Distance&& distance,
                                        RankOrder order = RankOrder::LowerIsBetter) {
    std::vector<std::size_t> ranks(references.size(), 0);
    parallel_for(references.size(), [&](std::size_t i) {
        const auto truth = distance(references[i], scene[correspondence[i]]);
        std::size_t better = 0;
        for (std::size_t j = 0; j < scene.size(); ++j) {
            const auto d = distance(references[i], scene[j]);
            if (order == RankOrder::LowerIsBetter ? d < truth : d > truth) {
                ++better;
            }
        }
        ranks[i] = better;
    });
    return ranks;
}

/// RICI ranking with early exit: each scene descriptor is only evaluated until
/// its distance provably reaches the correspondent's.
std::vector<std::size_t> rank_rici(std::span<const RiciDescriptor> references,
                                   std::span<const RiciDescriptor> scene,
                                   std::span<const std::uint32_t> correspondence);

enum class SupportVolume { Cylinder, Sphere };

/// Monte-Carlo estimate of (A_all - A_object) / A_all inside the support
/// volume around `anchor` (cylinder of radius R and height R centred on the
/// anchor, or ball of radius R). Samples are area-weighted over the triangles
/// that can reach the volume, which leaves the area ratio unchanged. Returns 0
/// when no surface lies inside the volume.
double estimate_clutter_fraction(std::span<const SceneObject> scene, const OrientedPoint& anchor,
                                 std::int32_t reference_object_id, double support_radius,
                                 std::size_t mc_samples, Prng rng,
                                 SupportVolume volume = SupportVolume::Cylinder);

}  // namespace rici
