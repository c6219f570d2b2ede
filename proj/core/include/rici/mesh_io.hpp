#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "rici/mesh.hpp"

namespace rici {

enum class MeshFormat { Obj, Ply };

struct LoadedMesh {
    TriangleMesh mesh;
    /// Zero-area faces removed after fan triangulation.
    std::size_t degenerate_faces_dropped{0};
    /// True when the file had no (usable) normals and they were recomputed.
    bool normals_computed{false};
};

/// Format from the file extension (.obj / .ply, case-insensitive).
std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path);

/// Reads OBJ or ASCII/binary PLY. Polygons are fan-triangulated, zero-area
/// faces dropped and unreferenced vertices removed. Missing normals are
/// computed as area-weighted averages of incident face normals.
/// Throws DataError on I/O failure, malformed input or when no triangle remains.
LoadedMesh load_mesh(const std::filesystem::path& path,
                     std::optional<MeshFormat> format = std::nullopt);

/// Debug dump: positions, normals and faces (`f i//i`).
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

}  // namespace rici
