#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rici/mesh.hpp"
#include "rici/spatial_grid.hpp"

namespace rici {

struct ShapeContextParams {
    int azimuth_bins{15};
    int elevation_bins{11};
    int radial_bins{12};
    double r_min{0.048};
    double r_max{0.3};

    bool operator==(const ShapeContextParams&) const = default;
    std::size_t bin_count() const {
        return static_cast<std::size_t>(azimuth_bins) * static_cast<std::size_t>(elevation_bins) *
               static_cast<std::size_t>(radial_bins);
    }
    /// Throws std::invalid_argument on non-positive counts or r_min >= r_max.
    void validate() const;
};

/// 3D shape context histogram. Bin (j, k, l) = (azimuth, elevation, radial
/// shell) lives at index (j * K + k) * L + l, so an azimuth rotation is a
/// rotation of contiguous blocks.
struct ShapeContextDescriptor {
    ShapeContextParams params;
    std::vector<float> bins;

    ShapeContextDescriptor() = default;
    explicit ShapeContextDescriptor(const ShapeContextParams& p) : params(p), bins(p.bin_count(), 0.0f) {}

    std::size_t index(int j, int k, int l) const {
        return (static_cast<std::size_t>(j) * static_cast<std::size_t>(params.elevation_bins) +
                static_cast<std::size_t>(k)) *
                   static_cast<std::size_t>(params.radial_bins) +
               static_cast<std::size_t>(l);
    }
    float at(int j, int k, int l) const { return bins[index(j, k, l)]; }
};

/// L + 1 log-spaced shell radii from r_min to r_max.
std::vector<double> radial_boundaries(double r_min, double r_max, int radial_bins);

/// For each sample, the number of samples (itself included) within `radius`.
std::vector<std::uint32_t> local_densities(std::span<const SampledPoint> samples, double radius);

struct ShapeContextBin {
    int azimuth{0};
    int elevation{0};
    int radial{0};
};

/// Bin of a point given in the anchor's aligned frame (spin normal on +z).
/// Returns false when the point is outside the shell r_min < d <= r_max.
bool shape_context_bin(const Vec3d& aligned, const ShapeContextParams& params,
                       std::span<const double> boundaries, ShapeContextBin& bin);

/// Volume of bin (k, l); all azimuth sectors have the same volume.
double shape_context_bin_volume(const ShapeContextParams& params, std::span<const double> boundaries,
                                int elevation, int radial);

/// Each sample with r_min < |p - S_v| <= r_max adds 1 / (rho * cbrt(V_bin)),
/// rho being its local density. Azimuth zero is the x-axis of the anchor's
/// projection frame. `densities` must be parallel to `samples`.
ShapeContextDescriptor generate_shape_context(std::span<const SampledPoint> samples,
                                              std::span<const std::uint32_t> densities,
                                              const OrientedPoint& anchor,
                                              const ShapeContextParams& params);

/// Computes the local densities with `local_density_radius` first.
ShapeContextDescriptor generate_shape_context(std::span<const SampledPoint> samples,
                                              const OrientedPoint& anchor,
                                              const ShapeContextParams& params,
                                              double local_density_radius);

/// Minimum over the J azimuth shifts of the Euclidean distance between the
/// L2-normalized needle and the shifted, L2-normalized haystack.
/// Throws std::invalid_argument when parameters differ.
double shape_context_distance(const ShapeContextDescriptor& needle,
                              const ShapeContextDescriptor& haystack);

/// Many descriptors over one sample cloud, with densities computed once.
class ShapeContextGenerator {
public:
    ShapeContextGenerator(std::span<const SampledPoint> samples, const ShapeContextParams& params,
                          double local_density_radius);

    ShapeContextDescriptor generate(const OrientedPoint& anchor) const;
    std::vector<ShapeContextDescriptor> generate_all(std::span<const OrientedPoint> anchors) const;

    std::span<const std::uint32_t> densities() const { return densities_; }

private:
    std::span<const SampledPoint> samples_;
    ShapeContextParams params_;
    std::vector<std::uint32_t> densities_;
    UniformGrid grid_;
};

/// L2-normalized copy used for bulk matching.
///
/// `by_block` stores the normalized bins block-major, so the J azimuth values
/// of one (k, l) cell are contiguous; `nonzero` lists the needle-side entries
/// that can contribute to a dot product.
struct PreparedShapeContext {
    struct Entry {
        std::uint32_t block;
        std::uint32_t azimuth;
        float value;
    };

    ShapeContextParams params;
    std::vector<float> by_block;
    std::vector<Entry> nonzero;
    /// Squared L2 norm after normalization: 1, or 0 for an empty descriptor.
    double norm_squared{0};

    explicit PreparedShapeContext(const ShapeContextDescriptor& d);
};

double prepared_shape_context_distance(const PreparedShapeContext& needle,
                                       const PreparedShapeContext& haystack);

}  // namespace rici
