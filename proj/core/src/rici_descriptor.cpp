#include "rici/rici_descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "rici/parallel.hpp"

namespace rici {

double rici_row_beta(int row, double support_radius, int resolution) {
    const double width = support_radius / resolution;
    return (row + 0.5) * width - 0.5 * support_radius;
}

double rici_column_radius(int column, double support_radius, int resolution) {
    return (column + 0.5) * (support_radius / resolution);
}

RowIntersection intersect_triangle_row(const Vec3d& t0, const Vec3d& t1, const Vec3d& t2,
                                       double beta) {
    const Vec3d* vertices[3] = {&t0, &t1, &t2};
    double offset[3];
    bool on_plane[3];
    int on_count = 0;
    int above = 0;
    int below = 0;
    for (int i = 0; i < 3; ++i) {
        offset[i] = vertices[i]->z - beta;
        on_plane[i] = std::abs(offset[i]) <= kPlaneContactEpsilon;
        if (on_plane[i]) {
            ++on_count;
        } else if (offset[i] > 0) {
            ++above;
        } else {
            ++below;
        }
    }
    RowIntersection result;
    if (on_count == 3) {
        result.outcome = RowOutcome::Coplanar;
        return result;
    }
    if (on_count == 0 && (above == 0 || below == 0)) {
        return result;
    }
    if (on_count == 1 && (above == 0 || below == 0)) {
        // Plane grazes a single vertex.
        result.outcome = RowOutcome::Degenerate;
        return result;
    }

    // Collect the two segment endpoints E0, E1 in the plane.
    double ex[2];
    double ey[2];
    int found = 0;
    for (int i = 0; i < 3 && found < 2; ++i) {
        if (on_plane[i]) {
            ex[found] = vertices[i]->x;
            ey[found] = vertices[i]->y;
            ++found;
        }
    }
    for (int i = 0; i < 3 && found < 2; ++i) {
        const int j = (i + 1) % 3;
        if (on_plane[i] || on_plane[j] || (offset[i] > 0) == (offset[j] > 0)) {
            continue;
        }
        const double t = offset[i] / (offset[i] - offset[j]);
        ex[found] = vertices[i]->x + (vertices[j]->x - vertices[i]->x) * t;
        ey[found] = vertices[i]->y + (vertices[j]->y - vertices[i]->y) * t;
        ++found;
    }

    const double dx = ex[1] - ex[0];
    const double dy = ey[1] - ey[0];
    const double segment_length = std::sqrt(dx * dx + dy * dy);
    if (found < 2 || segment_length < kPlaneContactEpsilon) {
        result.outcome = RowOutcome::Degenerate;
        return result;
    }

    // Rotate about z so E0E1 points along +x; the normalized direction is (cos, sin).
    const double cosine = dx / segment_length;
    const double sine = dy / segment_length;
    const double x0 = cosine * ex[0] + sine * ey[0];
    const double x1 = cosine * ex[1] + sine * ey[1];
    const double closest = std::abs(-sine * ex[0] + cosine * ey[0]);

    const double r0 = std::sqrt(ex[0] * ex[0] + ey[0] * ey[0]);
    const double r1 = std::sqrt(ex[1] * ex[1] + ey[1] * ey[1]);
    result.outcome = RowOutcome::Hit;
    result.ranges.single_low = std::min(r0, r1);
    result.ranges.single_high = std::max(r0, r1);
    // x0 < x1 by construction, so opposite signs means x0 < 0 < x1.
    result.ranges.has_double = x0 < 0.0 && x1 > 0.0;
    result.ranges.double_low =
        result.ranges.has_double ? std::min(closest, result.ranges.single_low) : result.ranges.single_low;
    return result;
}

namespace {

void validate_parameters(double support_radius, int resolution) {
    if (!(support_radius > 0.0)) {
        throw std::invalid_argument("support radius must be positive");
    }
    if (resolution < 2) {
        throw std::invalid_argument("resolution must be at least 2");
    }
}

/// Bin-centre lookups with exact comparisons against the same formulas used to
/// define rows and columns.
class BinLayout {
public:
    BinLayout(double support_radius, int resolution)
        : radius_(support_radius),
          resolution_(resolution),
          inv_width_(resolution / support_radius),
          row_offset_(0.5 * support_radius * inv_width_ + 0.5) {
        // One sentinel on each side keeps the walks below free of bounds checks.
        const double inf = std::numeric_limits<double>::infinity();
        betas_.assign(static_cast<std::size_t>(resolution) + 2, inf);
        rhos_.assign(static_cast<std::size_t>(resolution) + 2, inf);
        betas_[0] = rhos_[0] = -inf;
        for (int i = 0; i < resolution; ++i) {
            betas_[static_cast<std::size_t>(i) + 1] = rici_row_beta(i, support_radius, resolution);
            rhos_[static_cast<std::size_t>(i) + 1] = rici_column_radius(i, support_radius, resolution);
        }
    }

    bool matches(double support_radius, int resolution) const {
        return radius_ == support_radius && resolution_ == resolution;
    }

    double beta(int row) const { return betas_[static_cast<std::size_t>(row + 1)]; }
    double rho(int column) const { return rhos_[static_cast<std::size_t>(column + 1)]; }
    double last_rho() const { return rho(resolution_ - 1); }

    /// Smallest row whose beta >= value (resolution when none).
    int first_row_at_least(double value) const {
        return first_at_least(value, row_offset_, [this](int r) { return beta(r); });
    }
    /// Smallest row whose beta > value.
    int first_row_above(double value) const {
        return first_above(value, row_offset_, [this](int r) { return beta(r); });
    }
    int first_column_at_least(double value) const {
        return first_at_least(value, 0.5, [this](int c) { return rho(c); });
    }
    int first_column_above(double value) const {
        return first_above(value, 0.5, [this](int c) { return rho(c); });
    }

private:
    int estimate(double value, double offset) const {
        // Starting point only; the callers walk to the exact answer.
        const double guess = std::min(std::max(0.0, value * inv_width_ + offset), double(resolution_));
        return static_cast<int>(guess);
    }

    template <typename Center>
    int first_at_least(double value, double offset, Center center) const {
        int i = estimate(value, offset);
        while (center(i - 1) >= value) {
            --i;
        }
        while (center(i) < value) {
            ++i;
        }
        return i;
    }

    template <typename Center>
    int first_above(double value, double offset, Center center) const {
        int i = estimate(value, offset);
        while (center(i - 1) > value) {
            --i;
        }
        while (center(i) <= value) {
            ++i;
        }
        return i;
    }

    double radius_;
    int resolution_;
    double inv_width_;
    double row_offset_;
    std::vector<double> betas_;
    std::vector<double> rhos_;
};

/// Per-row difference arrays: a column range [begin, end) costs two writes.
/// resolve() leaves the buffer zeroed, so one instance serves many descriptors.
class RowDeltas {
public:
    void reset(int resolution) {
        stride_ = static_cast<std::size_t>(resolution) + 1;
        const std::size_t size = stride_ * static_cast<std::size_t>(resolution);
        if (deltas_.size() != size) {
            deltas_.assign(size, 0);
            touched_.assign(static_cast<std::size_t>(resolution), 0);
        }
    }

    void add(int row, int begin, int end, std::int32_t amount) {
        if (begin >= end) {
            return;
        }
        std::int32_t* line = &deltas_[static_cast<std::size_t>(row) * stride_];
        line[begin] += amount;
        line[end] -= amount;
        touched_[static_cast<std::size_t>(row)] = 1;
    }

    /// Untouched rows stay as they are in `out`, which must start zeroed.
    void resolve(RiciDescriptor& out) {
        const int n = out.resolution;
        for (int row = 0; row < n; ++row) {
            if (!touched_[static_cast<std::size_t>(row)]) {
                continue;
            }
            touched_[static_cast<std::size_t>(row)] = 0;
            std::int32_t* line = &deltas_[static_cast<std::size_t>(row) * stride_];
            std::int32_t running = 0;
            for (int col = 0; col < n; ++col) {
                running += line[col];
                line[col] = 0;
                out.at(row, col) = static_cast<std::uint32_t>(running);
            }
            line[n] = 0;
        }
    }

private:
    std::size_t stride_{0};
    std::vector<std::int32_t> deltas_;
    std::vector<std::uint8_t> touched_;
};

/// Scene vertices in the aligned frame, computed on first use per descriptor.
class AlignedVertices {
public:
    void reset(std::size_t vertex_count) {
        if (stamp_.size() < vertex_count) {
            stamp_.assign(vertex_count, 0);
            aligned_.resize(vertex_count);
            current_ = 0;
        }
        if (++current_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            current_ = 1;
        }
    }

    const Vec3d& get(const TriangleMesh& scene, const ProjectionBasis<double>& basis, std::uint32_t index) {
        if (stamp_[index] != current_) {
            stamp_[index] = current_;
            aligned_[index] = basis.align(scene.vertices[index]);
        }
        return aligned_[index];
    }

private:
    std::vector<std::uint32_t> stamp_;
    std::vector<Vec3d> aligned_;
    std::uint32_t current_{0};
};

double min3(double a, double b, double c) { return std::min(a, std::min(b, c)); }
double max3(double a, double b, double c) { return std::max(a, std::max(b, c)); }

struct Scratch {
    RowDeltas deltas;
    AlignedVertices vertices;
    std::optional<BinLayout> layout;

    const BinLayout& layout_for(double support_radius, int resolution) {
        if (!layout || !layout->matches(support_radius, resolution)) {
            layout.emplace(support_radius, resolution);
        }
        return *layout;
    }
};

Scratch& thread_scratch() {
    thread_local Scratch scratch;
    return scratch;
}

[[gnu::always_inline]] inline void add_ranges(const IntersectionRanges& r, int row, const BinLayout& layout, RowDeltas& out) {
    if ((r.has_double ? r.double_low : r.single_low) > layout.last_rho()) {
        return;
    }
    const int single_begin = layout.first_column_at_least(r.single_low);
    const int single_end = layout.first_column_above(r.single_high);
    if (r.has_double) {
        out.add(row, layout.first_column_at_least(r.double_low), single_begin, 2);
    }
    out.add(row, single_begin, single_end, 1);
}

void rasterize_triangle(const Vec3d& a, const Vec3d& b, const Vec3d& c, const BinLayout& layout,
                        RowDeltas& out, RiciDiagnostics& diagnostics) {
    if (!(squared_length(cross(b - a, c - a)) > 0.0)) {
        ++diagnostics.degenerate_triangles;
        return;
    }
    // Vertices by height; rows strictly between two heights cut the edge joining them.
    const Vec3d* v[3] = {&a, &b, &c};
    if (v[1]->z < v[0]->z) std::swap(v[0], v[1]);
    if (v[2]->z < v[1]->z) std::swap(v[1], v[2]);
    if (v[1]->z < v[0]->z) std::swap(v[0], v[1]);
    const Vec3d& lo = *v[0];
    const Vec3d& mid = *v[1];
    const Vec3d& hi = *v[2];
    const int row_begin = layout.first_row_at_least(lo.z);
    const int row_end = layout.first_row_above(hi.z);
    if (row_begin >= row_end) {
        return;
    }
    const auto slope = [](const Vec3d& from, const Vec3d& to) {
        const double dz = to.z - from.z;
        return dz > 0.0 ? std::pair{(to.x - from.x) / dz, (to.y - from.y) / dz} : std::pair{0.0, 0.0};
    };
    const auto [long_x, long_y] = slope(lo, hi);
    const auto [lower_x, lower_y] = slope(lo, mid);
    const auto [upper_x, upper_y] = slope(mid, hi);

    // Only rows next to a vertex height can come within contact distance of it.
    const auto near_row = [&](double z) { return layout.first_row_at_least(z - kPlaneContactEpsilon); };
    const int contact_rows[3] = {near_row(lo.z), near_row(mid.z), near_row(hi.z)};
    for (int row = row_begin; row < row_end; ++row) {
        const double beta = layout.beta(row);
        const bool may_touch = row == contact_rows[0] || row == contact_rows[1] || row == contact_rows[2];
        if (may_touch && (std::abs(lo.z - beta) <= kPlaneContactEpsilon ||
                          std::abs(mid.z - beta) <= kPlaneContactEpsilon ||
                          std::abs(hi.z - beta) <= kPlaneContactEpsilon)) {
            const RowIntersection hit = intersect_triangle_row(a, b, c, beta);
            if (hit.outcome == RowOutcome::Coplanar) {
                ++diagnostics.coplanar_rows;
            } else if (hit.outcome == RowOutcome::Degenerate) {
                ++diagnostics.degenerate_rows;
            } else if (hit.outcome == RowOutcome::Hit) {
                add_ranges(hit.ranges, row, layout, out);
            }
            continue;
        }
        const double t_long = beta - lo.z;
        const double x0 = lo.x + long_x * t_long;
        const double y0 = lo.y + long_y * t_long;
        double x1;
        double y1;
        if (beta < mid.z) {
            x1 = lo.x + lower_x * t_long;
            y1 = lo.y + lower_y * t_long;
        } else {
            const double t = beta - mid.z;
            x1 = mid.x + upper_x * t;
            y1 = mid.y + upper_y * t;
        }
        const double dx = x1 - x0;
        const double dy = y1 - y0;
        const double length_squared = dx * dx + dy * dy;
        if (!(length_squared >= kPlaneContactEpsilon * kPlaneContactEpsilon)) {
            ++diagnostics.degenerate_rows;
            continue;
        }
        const double q0 = x0 * x0 + y0 * y0;
        const double q1 = x1 * x1 + y1 * y1;
        IntersectionRanges r;
        r.single_low = std::sqrt(std::min(q0, q1));
        r.single_high = std::sqrt(std::max(q0, q1));
        // The foot of the perpendicular from the axis lies strictly inside the segment.
        r.has_double = x0 * dx + y0 * dy < 0.0 && x1 * dx + y1 * dy > 0.0;
        r.double_low = r.single_low;
        if (r.has_double) {
            const double closest = std::abs(x0 * y1 - y0 * x1) / std::sqrt(length_squared);
            r.double_low = std::min(closest, r.single_low);
        }
        add_ranges(r, row, layout, out);
    }
}

}  // namespace

RiciDescriptor generate_rici(const TriangleMesh& scene, std::span<const std::uint32_t> triangles,
                             const OrientedPoint& anchor, double support_radius, int resolution,
                             RiciDiagnostics* diagnostics) {
    validate_parameters(support_radius, resolution);
    const ProjectionBasis<double> basis = build_basis<double>(anchor);
    Scratch& scratch = thread_scratch();
    const BinLayout& layout = scratch.layout_for(support_radius, resolution);
    const double half = 0.5 * support_radius;
    const double reach_squared = support_radius * support_radius * (1.0 + 1e-9);
    RiciDescriptor out(resolution, support_radius);
    scratch.deltas.reset(resolution);
    scratch.vertices.reset(scene.vertices.size());
    RiciDiagnostics local;
    for (const auto index : triangles) {
        const Triangle& tri = scene.triangles[index];
        const Vec3d& a = scratch.vertices.get(scene, basis, tri[0]);
        const Vec3d& b = scratch.vertices.get(scene, basis, tri[1]);
        const Vec3d& c = scratch.vertices.get(scene, basis, tri[2]);
        // Rows only span (-R/2, R/2); skip triangles entirely above or below.
        if (min3(a.z, b.z, c.z) > half || max3(a.z, b.z, c.z) < -half) {
            continue;
        }
        // Nor triangles whose xy bounding box misses the disc of radius R.
        const double x_gap = std::max(0.0, std::max(min3(a.x, b.x, c.x), -max3(a.x, b.x, c.x)));
        const double y_gap = std::max(0.0, std::max(min3(a.y, b.y, c.y), -max3(a.y, b.y, c.y)));
        if (x_gap * x_gap + y_gap * y_gap > reach_squared) {
            continue;
        }
        rasterize_triangle(a, b, c, layout, scratch.deltas, local);
    }
    scratch.deltas.resolve(out);
    if (diagnostics != nullptr) {
        *diagnostics += local;
    }
    return out;
}

RiciDescriptor generate_rici(const TriangleMesh& scene, const OrientedPoint& anchor,
                             double support_radius, int resolution, RiciDiagnostics* diagnostics) {
    std::vector<std::uint32_t> all(scene.triangles.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = static_cast<std::uint32_t>(i);
    }
    return generate_rici(scene, all, anchor, support_radius, resolution, diagnostics);
}

RiciGenerator::RiciGenerator(const TriangleMesh& scene, double support_radius, int resolution)
    : scene_(scene),
      support_radius_(support_radius),
      resolution_(resolution),
      grid_(UniformGrid::for_triangles(scene, support_radius > 0.0 ? 0.5 * support_radius : 1.0)) {
    validate_parameters(support_radius, resolution);
    bounds_.reserve(scene.triangles.size());
    for (const auto& tri : scene.triangles) {
        const Vec3d& a = scene.vertices[tri[0]];
        const Vec3d& b = scene.vertices[tri[1]];
        const Vec3d& c = scene.vertices[tri[2]];
        const Vec3d center = (a + b + c) * (1.0 / 3.0);
        const double radius = std::sqrt(
            std::max(squared_length(a - center), std::max(squared_length(b - center), squared_length(c - center))));
        bounds_.push_back({center, radius * (1.0 + 1e-12)});
    }
}

RiciDescriptor RiciGenerator::generate(const OrientedPoint& anchor, RiciDiagnostics* diagnostics) const {
    // A triangle outside the ball bounding the support cylinder cannot cross
    // any circle of radius <= R on a plane with |beta| <= R/2.
    const double reach = std::sqrt(1.25) * support_radius_ * (1.0 + 1e-9) + 1e-12;
    thread_local std::vector<std::uint32_t> candidates;
    grid_.query(anchor.position, reach, candidates);
    std::erase_if(candidates, [&](std::uint32_t t) {
        const double limit = reach + bounds_[t].radius;
        return squared_length(bounds_[t].center - anchor.position) > limit * limit;
    });
    return generate_rici(scene_, candidates, anchor, support_radius_, resolution_, diagnostics);
}

std::vector<RiciDescriptor> RiciGenerator::generate_all(std::span<const OrientedPoint> anchors) const {
    std::vector<RiciDescriptor> out(anchors.size());
    parallel_for(anchors.size(), [&](std::size_t i) { out[i] = generate(anchors[i]); });
    return out;
}

namespace {

void check_compatible(const RiciDescriptor& a, const RiciDescriptor& b) {
    if (a.resolution != b.resolution || a.support_radius != b.support_radius ||
        a.bins.size() != b.bins.size()) {
        throw std::invalid_argument("RICI descriptors differ in resolution or support radius");
    }
}

}  // namespace

std::uint64_t crd_distance(const RiciDescriptor& needle, const RiciDescriptor& haystack,
                           std::optional<std::uint64_t> early_exit_threshold) {
    check_compatible(needle, haystack);
    const int n = needle.resolution;
    const std::uint32_t* nb = needle.bins.data();
    const std::uint32_t* hb = haystack.bins.data();
    std::uint64_t score = 0;
    for (int row = 0; row < n; ++row) {
        const std::size_t base = static_cast<std::size_t>(row) * static_cast<std::size_t>(n);
        // Column 0 has no left neighbour and never contributes.
        for (int col = 1; col < n; ++col) {
            const std::size_t i = base + static_cast<std::size_t>(col);
            const std::int64_t needle_delta = std::int64_t(nb[i]) - std::int64_t(nb[i - 1]);
            if (needle_delta != 0) {
                const std::int64_t haystack_delta = std::int64_t(hb[i]) - std::int64_t(hb[i - 1]);
                const std::int64_t diff = needle_delta - haystack_delta;
                score += static_cast<std::uint64_t>(diff * diff);
            }
        }
        if (early_exit_threshold && score > *early_exit_threshold) {
            return score;
        }
    }
    return score;
}

SparseCrdNeedle::SparseCrdNeedle(const RiciDescriptor& needle)
    : resolution_(needle.resolution), support_radius_(needle.support_radius) {
    const int n = needle.resolution;
    for (int row = 0; row < n; ++row) {
        for (int col = 1; col < n; ++col) {
            const std::int64_t delta = std::int64_t(needle.at(row, col)) - std::int64_t(needle.at(row, col - 1));
            if (delta != 0) {
                offsets_.push_back(static_cast<std::uint32_t>(row * n + col));
                deltas_.push_back(delta);
            }
        }
    }
}

std::uint64_t SparseCrdNeedle::distance(const RiciDescriptor& haystack,
                                        std::optional<std::uint64_t> early_exit_threshold) const {
    if (haystack.resolution != resolution_ || haystack.support_radius != support_radius_) {
        throw std::invalid_argument("RICI descriptors differ in resolution or support radius");
    }
    const std::uint32_t* hb = haystack.bins.data();
    const std::uint64_t limit = early_exit_threshold.value_or(UINT64_MAX);
    std::uint64_t score = 0;
    constexpr std::size_t check_every = 16;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const std::uint32_t o = offsets_[i];
        const std::int64_t diff = deltas_[i] - (std::int64_t(hb[o]) - std::int64_t(hb[o - 1]));
        score += static_cast<std::uint64_t>(diff * diff);
        if ((i % check_every) == check_every - 1 && score > limit) {
            return score;
        }
    }
    return score;
}

}  // namespace rici
