#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "rici/clutterbox.hpp"

namespace rici::cli {

/// Everything in a clutterbox run that is fixed by the seed. Timings are
/// excluded so repeated runs serialize to identical bytes.
nlohmann::ordered_json clutterbox_report(const ClutterboxResult& result);

nlohmann::ordered_json clutterbox_timings(const ClutterboxResult& result);

nlohmann::ordered_json config_json(const ClutterboxConfig& config);

/// Writes `rank,count` rows in ascending rank order.
void write_rank_csv(const std::filesystem::path& path, const RankHistogram& histogram);

/// Writes `vertexId,clutterFraction,rank` rows.
void write_heatmap_csv(const std::filesystem::path& path, const std::vector<VertexClutterRecord>& records);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& value);

}  // namespace rici::cli
