#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rici/mesh.hpp"
#include "rici/vec3.hpp"

namespace rici {

/// Uniform grid over axis-aligned boxes. Queries return a conservative
/// superset of the items whose boxes overlap a ball, sorted ascending and
/// without duplicates, so callers visit candidates in the same order a full
/// scan would.
class UniformGrid {
public:
    struct Box {
        Vec3d lo;
        Vec3d hi;
    };

    UniformGrid(std::span<const Box> boxes, double cell_size);

    static UniformGrid for_triangles(const TriangleMesh& mesh, double cell_size);
    static UniformGrid for_points(std::span<const Vec3d> points, double cell_size);

    void query(const Vec3d& center, double radius, std::vector<std::uint32_t>& out) const;

    std::size_t item_count() const { return item_count_; }

private:
    std::int64_t clamp_cell(double coordinate, int axis) const;

    Vec3d origin_;
    double cell_size_{1};
    std::int64_t dims_[3]{1, 1, 1};
    std::size_t item_count_{0};
    std::vector<std::uint32_t> cell_start_;
    std::vector<std::uint32_t> items_;
};

}  // namespace rici
