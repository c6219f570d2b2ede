#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rici/mesh.hpp"
#include "rici/projection.hpp"
#include "rici/spatial_grid.hpp"

namespace rici {

/// Radial intersection count image.
///
/// `bins` is row-major with `resolution` rows and columns. Row r holds the
/// circles on the plane beta_r = (r + 0.5) * w - R/2 and column c the circles
/// of radius rho_c = (c + 0.5) * w, where w = R / resolution. Each bin counts
/// how often its circle crosses the scene surface.
struct RiciDescriptor {
    int resolution{0};
    double support_radius{0};
    std::vector<std::uint32_t> bins;

    RiciDescriptor() = default;
    RiciDescriptor(int resolution_, double support_radius_)
        : resolution(resolution_),
          support_radius(support_radius_),
          bins(static_cast<std::size_t>(resolution_) * static_cast<std::size_t>(resolution_), 0) {}

    std::uint32_t at(int row, int column) const {
        return bins[static_cast<std::size_t>(row) * static_cast<std::size_t>(resolution) +
                    static_cast<std::size_t>(column)];
    }
    std::uint32_t& at(int row, int column) {
        return bins[static_cast<std::size_t>(row) * static_cast<std::size_t>(resolution) +
                    static_cast<std::size_t>(column)];
    }

    bool operator==(const RiciDescriptor&) const = default;
};

/// Height of the circle plane for row `row`.
double rici_row_beta(int row, double support_radius, int resolution);
/// Radius of the circles in column `column`.
double rici_column_radius(int column, double support_radius, int resolution);

/// Radii at which circles on one plane cross a triangle's intersection segment:
/// twice for radii in [double_low, single_low), once in [single_low, single_high].
struct IntersectionRanges {
    bool has_double{false};
    double double_low{0};
    double single_low{0};
    double single_high{0};
};

enum class RowOutcome {
    Miss,        ///< plane does not reach the triangle
    Coplanar,    ///< triangle lies in the plane; infinite intersections, skipped
    Degenerate,  ///< plane only touches one vertex, or the segment has zero length
    Hit,
};

struct RowIntersection {
    RowOutcome outcome{RowOutcome::Miss};
    IntersectionRanges ranges;
};

/// Distance along the plane normal below which a vertex counts as lying on the plane.
inline constexpr double kPlaneContactEpsilon = 1e-12;

/// Intersects a triangle given in the aligned frame (spin normal on +z) with
/// the plane z = beta and derives the single/double intersection radius ranges.
RowIntersection intersect_triangle_row(const Vec3d& t0, const Vec3d& t1, const Vec3d& t2,
                                       double beta);

/// Counters for geometry the generator could not rasterize.
struct RiciDiagnostics {
    std::size_t degenerate_triangles{0};
    std::size_t coplanar_rows{0};
    std::size_t degenerate_rows{0};

    RiciDiagnostics& operator+=(const RiciDiagnostics& o) {
        degenerate_triangles += o.degenerate_triangles;
        coplanar_rows += o.coplanar_rows;
        degenerate_rows += o.degenerate_rows;
        return *this;
    }
};

/// Brute force over every triangle of `scene`.
/// Throws std::invalid_argument unless support_radius > 0 and resolution >= 2.
RiciDescriptor generate_rici(const TriangleMesh& scene, const OrientedPoint& anchor,
                             double support_radius, int resolution,
                             RiciDiagnostics* diagnostics = nullptr);

/// Same as generate_rici restricted to the listed triangles, visited in the given order.
RiciDescriptor generate_rici(const TriangleMesh& scene, std::span<const std::uint32_t> triangles,
                             const OrientedPoint& anchor, double support_radius, int resolution,
                             RiciDiagnostics* diagnostics = nullptr);

/// Generates many descriptors for one scene. Only triangles near the support
/// volume are visited; every triangle that can contribute is always included,
/// so results equal generate_rici bin for bin.
class RiciGenerator {
public:
    RiciGenerator(const TriangleMesh& scene, double support_radius, int resolution);

    RiciDescriptor generate(const OrientedPoint& anchor, RiciDiagnostics* diagnostics = nullptr) const;

    /// One descriptor per anchor, computed in parallel.
    std::vector<RiciDescriptor> generate_all(std::span<const OrientedPoint> anchors) const;

private:
    struct Bound {
        Vec3d center;
        double radius;
    };

    const TriangleMesh& scene_;
    double support_radius_;
    int resolution_;
    UniformGrid grid_;
    /// Bounding sphere per triangle, for a cheap reject after the grid query.
    std::vector<Bound> bounds_;
};

/// Clutter-resistant distance.
///
/// Sums (dn - dh)^2 over every bin (r, c), c >= 1, where dn and dh are the
/// horizontal deltas bin(r, c) - bin(r, c - 1) of needle and haystack and
/// dn != 0. Asymmetric by construction. With a threshold the scan may stop
/// once the running sum exceeds it; the returned value is then some number
/// greater than the threshold. Throws std::invalid_argument when resolution or
/// support radius differ.
std::uint64_t crd_distance(const RiciDescriptor& needle, const RiciDescriptor& haystack,
                           std::optional<std::uint64_t> early_exit_threshold = std::nullopt);

/// A needle reduced to its nonzero deltas. Evaluates the same sum as
/// crd_distance while touching only the bins that can contribute.
class SparseCrdNeedle {
public:
    explicit SparseCrdNeedle(const RiciDescriptor& needle);

    std::uint64_t distance(const RiciDescriptor& haystack,
                           std::optional<std::uint64_t> early_exit_threshold = std::nullopt) const;

    std::size_t nonzero_count() const { return offsets_.size(); }

private:
    int resolution_;
    double support_radius_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::int64_t> deltas_;
};

}  // namespace rici
