#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rici/mesh.hpp"
#include "rici/rici_descriptor.hpp"
#include "rici/shape_context.hpp"

// Independent reference implementations used only by tests.
namespace oracle {

using rici::OrientedPoint;
using rici::Vec3d;

double heron_area(const Vec3d& a, const Vec3d& b, const Vec3d& c);

struct Cylindrical {
    double alpha;
    double beta;
};

/// beta = (p - v) . n, alpha = |(p - v) - beta n|.
Cylindrical project_by_decomposition(const OrientedPoint& anchor, const Vec3d& p);

/// Coordinates in an arbitrary orthonormal frame whose third axis is the normal.
Vec3d to_normal_frame(const OrientedPoint& anchor, const Vec3d& p);

struct RiciReference {
    std::vector<std::uint32_t> bins;
    /// Bins whose circle passes within the tolerance of a triangle boundary.
    std::vector<std::uint8_t> excluded;
    std::size_t excluded_count{0};
};

/// Counts, for every circle, its crossings with every triangle by solving the
/// segment-circle quadratic on the triangle's cross-section with the circle's plane.
RiciReference rici_by_quadratic(const rici::TriangleMesh& mesh, const OrientedPoint& anchor,
                                double support_radius, int resolution, double boundary_tolerance);

/// Sum over rows and columns >= 1 with a nonzero needle delta.
std::uint64_t crd_by_definition(const rici::RiciDescriptor& needle, const rici::RiciDescriptor& haystack);

/// Sequential double-precision spin image.
std::vector<double> spin_image_reference(std::span<const rici::SampledPoint> samples, const OrientedPoint& anchor,
                                         double support_radius, int resolution,
                                         std::optional<double> support_angle_degrees);

/// Textbook two-pass Pearson correlation.
double pearson_two_pass(std::span<const double> a, std::span<const double> b);

/// Minimum over explicit azimuth rotations of the L2 distance of normalized copies.
double shape_context_shift_minimum(const rici::ShapeContextDescriptor& a, const rici::ShapeContextDescriptor& b);

/// Rank of `truth` among `distances` from a full sort: index of the first
/// element that is not strictly better.
std::size_t rank_by_sort(std::vector<double> distances, double truth, bool lower_is_better);

}  // namespace oracle
