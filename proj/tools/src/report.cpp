#include "rici_cli/report.hpp"

#include <fstream>
#include <iomanip>

#include "rici/errors.hpp"
#include "rici/version.hpp"

namespace rici::cli {

using json = nlohmann::ordered_json;

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

}  // namespace

json config_json(const ClutterboxConfig& config) {
    const ShapeContextParams sc = config.effective_shape_context();
    json j;
    j["seed"] = config.seed;
    j["box_side"] = config.box_side;
    j["object_counts"] = config.object_counts;
    j["method"] = to_string(config.method);
    j["support_radius"] = config.support_radius;
    j["resolution"] = config.resolution;
    j["shape_context"] = {{"azimuth_bins", sc.azimuth_bins},
                          {"elevation_bins", sc.elevation_bins},
                          {"radial_bins", sc.radial_bins},
                          {"r_min", sc.r_min},
                          {"r_max", sc.r_max}};
    j["local_density_radius"] = config.local_density_radius > 0.0 ? config.local_density_radius : sc.r_min;
    j["samples_per_triangle"] = config.samples_per_triangle;
    j["sampling_mode"] = config.sampling_mode == SamplingMode::AreaWeighted ? "area" : "triangle";
    j["support_angle_degrees"] =
        config.support_angle_degrees ? json(*config.support_angle_degrees) : json(nullptr);
    j["dataset"] = config.dataset.string();
    j["identity_reference_placement"] = config.identity_reference_placement;
    j["clutter_samples"] = config.clutter_samples;
    return j;
}

json clutterbox_report(const ClutterboxResult& result) {
    json j;
    j["tool"] = "rici";
    j["version"] = kVersion;
    j["config"] = config_json(result.config);
    j["selected_meshes"] = result.selected_meshes;
    j["reference_mesh"] = result.reference_mesh;
    json placements = json::array();
    for (const auto& p : result.placements) {
        const auto& t = p.transform;
        placements.push_back({{"mesh", p.mesh},
                              {"object_id", p.object_id},
                              {"rotation_wxyz", {t.w, t.x, t.y, t.z}},
                              {"translation", {t.translation.x, t.translation.y, t.translation.z}}});
    }
    j["placements"] = placements;
    j["reference_descriptor_count"] = result.reference_descriptor_count;
    json levels = json::array();
    for (const auto& level : result.levels) {
        json histogram = json::array();
        for (const auto& [rank, count] : level.histogram.counts) {
            histogram.push_back({{"rank", rank}, {"count", count}});
        }
        json records = json::array();
        for (const auto& r : level.records) {
            records.push_back({{"vertex_id", r.vertex_id}, {"clutter_fraction", r.clutter_fraction}, {"rank", r.rank}});
        }
        levels.push_back({{"object_count", level.histogram.clutter_object_count},
                          {"scene_descriptor_count", level.scene_descriptor_count},
                          {"total_queries", level.histogram.total_queries},
                          {"rank0_fraction", level.histogram.rank0_fraction()},
                          {"histogram", histogram},
                          {"records", records}});
    }
    j["levels"] = levels;
    j["warnings"] = result.warnings;
    return j;
}

json clutterbox_timings(const ClutterboxResult& result) {
    json levels = json::array();
    for (const auto& level : result.levels) {
        levels.push_back({{"object_count", level.histogram.clutter_object_count},
                          {"scene_descriptor_count", level.scene_descriptor_count},
                          {"generation_seconds", level.generation_seconds},
                          {"comparison_seconds", level.comparison_seconds}});
    }
    return {{"method", to_string(result.config.method)},
            {"reference_descriptor_count", result.reference_descriptor_count},
            {"reference_generation_seconds", result.reference_generation_seconds},
            {"levels", levels}};
}

void write_rank_csv(const std::filesystem::path& path, const RankHistogram& histogram) {
    auto out = open_output(path);
    out << "rank,count\n";
    for (const auto& [rank, count] : histogram.counts) {
        out << rank << ',' << count << '\n';
    }
}

void write_heatmap_csv(const std::filesystem::path& path, const std::vector<VertexClutterRecord>& records) {
    auto out = open_output(path);
    out << "vertexId,clutterFraction,rank\n" << std::setprecision(17);
    for (const auto& r : records) {
        out << r.vertex_id << ',' << r.clutter_fraction << ',' << r.rank << '\n';
    }
}

void write_json(const std::filesystem::path& path, const json& value) {
    auto out = open_output(path);
    out << value.dump(2) << '\n';
    if (!out) {
        throw DataError("write error on " + path.string());
    }
}

}  // namespace rici::cli
