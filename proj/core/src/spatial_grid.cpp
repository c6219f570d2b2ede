#include "rici/spatial_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rici {

namespace {
constexpr std::int64_t kMaxCellsPerAxis = 256;
}

UniformGrid::UniformGrid(std::span<const Box> boxes, double cell_size) : item_count_(boxes.size()) {
    if (!(cell_size > 0.0)) {
        throw std::invalid_argument("UniformGrid: cell size must be positive");
    }
    Vec3d lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
    Vec3d hi{-lo.x, -lo.y, -lo.z};
    for (const auto& b : boxes) {
        lo = {std::min(lo.x, b.lo.x), std::min(lo.y, b.lo.y), std::min(lo.z, b.lo.z)};
        hi = {std::max(hi.x, b.hi.x), std::max(hi.y, b.hi.y), std::max(hi.z, b.hi.z)};
    }
    if (boxes.empty()) {
        lo = hi = {};
    }
    origin_ = lo;
    const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    cell_size_ = std::max(cell_size, extent / static_cast<double>(kMaxCellsPerAxis));
    for (int axis = 0; axis < 3; ++axis) {
        dims_[axis] = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor((hi[axis] - lo[axis]) / cell_size_)) + 1);
    }
    const std::size_t cell_count = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);

    // Counting sort into CSR layout.
    std::vector<std::uint32_t> counts(cell_count + 1, 0);
    auto for_each_cell = [&](const Box& b, auto&& fn) {
        const std::int64_t x0 = clamp_cell(b.lo.x, 0), x1 = clamp_cell(b.hi.x, 0);
        const std::int64_t y0 = clamp_cell(b.lo.y, 1), y1 = clamp_cell(b.hi.y, 1);
        const std::int64_t z0 = clamp_cell(b.lo.z, 2), z1 = clamp_cell(b.hi.z, 2);
        for (std::int64_t z = z0; z <= z1; ++z) {
            for (std::int64_t y = y0; y <= y1; ++y) {
                for (std::int64_t x = x0; x <= x1; ++x) {
                    fn(static_cast<std::size_t>((z * dims_[1] + y) * dims_[0] + x));
                }
            }
        }
    };
    for (const auto& b : boxes) {
        for_each_cell(b, [&](std::size_t cell) { ++counts[cell + 1]; });
    }
    for (std::size_t i = 1; i < counts.size(); ++i) {
        counts[i] += counts[i - 1];
    }
    cell_start_ = counts;
    items_.resize(counts.back());
    std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for_each_cell(boxes[i], [&](std::size_t cell) { items_[cursor[cell]++] = static_cast<std::uint32_t>(i); });
    }
}

UniformGrid UniformGrid::for_triangles(const TriangleMesh& mesh, double cell_size) {
    std::vector<Box> boxes;
    boxes.reserve(mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const Vec3d& a = mesh.vertices[tri[0]];
        const Vec3d& b = mesh.vertices[tri[1]];
        const Vec3d& c = mesh.vertices[tri[2]];
        boxes.push_back({{std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}), std::min({a.z, b.z, c.z})},
                         {std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y}), std::max({a.z, b.z, c.z})}});
    }
    return UniformGrid(boxes, cell_size);
}

UniformGrid UniformGrid::for_points(std::span<const Vec3d> points, double cell_size) {
    std::vector<Box> boxes;
    boxes.reserve(points.size());
    for (const auto& p : points) {
        boxes.push_back({p, p});
    }
    return UniformGrid(boxes, cell_size);
}

std::int64_t UniformGrid::clamp_cell(double coordinate, int axis) const {
    const double cell = std::floor((coordinate - origin_[axis]) / cell_size_);
    if (!(cell >= 0.0)) {
        return 0;
    }
    return std::min<std::int64_t>(dims_[axis] - 1, static_cast<std::int64_t>(cell));
}

void UniformGrid::query(const Vec3d& center, double radius, std::vector<std::uint32_t>& out) const {
    out.clear();
    const Box b{center - Vec3d{radius, radius, radius}, center + Vec3d{radius, radius, radius}};
    for (int axis = 0; axis < 3; ++axis) {
        const double max_edge = origin_[axis] + cell_size_ * static_cast<double>(dims_[axis]);
        if (b.hi[axis] < origin_[axis] || b.lo[axis] > max_edge) {
            return;
        }
    }
    const std::int64_t x0 = clamp_cell(b.lo.x, 0), x1 = clamp_cell(b.hi.x, 0);
    const std::int64_t y0 = clamp_cell(b.lo.y, 1), y1 = clamp_cell(b.hi.y, 1);
    const std::int64_t z0 = clamp_cell(b.lo.z, 2), z1 = clamp_cell(b.hi.z, 2);

    // Mark items in a per-thread bitmap, then read it back in index order.
    thread_local std::vector<std::uint64_t> marks;
    const std::size_t words = (item_count_ + 63) / 64;
    if (marks.size() < words) {
        marks.assign(words, 0);
    }
    std::size_t first_word = words;
    std::size_t last_word = 0;
    for (std::int64_t z = z0; z <= z1; ++z) {
        for (std::int64_t y = y0; y <= y1; ++y) {
            for (std::int64_t x = x0; x <= x1; ++x) {
                const auto cell = static_cast<std::size_t>((z * dims_[1] + y) * dims_[0] + x);
                for (std::uint32_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
                    const std::uint32_t item = items_[k];
                    const std::size_t word = item >> 6;
                    marks[word] |= std::uint64_t{1} << (item & 63);
                    first_word = std::min(first_word, word);
                    last_word = std::max(last_word, word);
                }
            }
        }
    }
    for (std::size_t word = first_word; word <= last_word && word < words; ++word) {
        std::uint64_t bits = marks[word];
        marks[word] = 0;
        while (bits != 0) {
            out.push_back(static_cast<std::uint32_t>(word * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
            bits &= bits - 1;
        }
    }
}

}  // namespace rici
