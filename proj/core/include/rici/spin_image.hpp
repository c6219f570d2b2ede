#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rici/mesh.hpp"
#include "rici/spatial_grid.hpp"

namespace rici {

/// Spin image with the same bin layout as RiciDescriptor: row-major,
/// alpha in [0, R] across columns, beta in [-R/2, R/2] across rows.
struct SpinImageDescriptor {
    int resolution{0};
    double support_radius{0};
    std::vector<float> bins;

    SpinImageDescriptor() = default;
    SpinImageDescriptor(int resolution_, double support_radius_)
        : resolution(resolution_),
          support_radius(support_radius_),
          bins(static_cast<std::size_t>(resolution_) * static_cast<std::size_t>(resolution_), 0.0f) {}

    float at(int row, int column) const {
        return bins[static_cast<std::size_t>(row) * static_cast<std::size_t>(resolution) +
                    static_cast<std::size_t>(column)];
    }
};

/// Support angle used when filtering is enabled without an explicit value.
inline constexpr double kDefaultSupportAngleDegrees = 60.0;

/// Accumulates samples into a spin image (64-bit geometry, 32-bit bins).
///
/// With a support angle, samples whose normal makes a larger angle with the
/// spin normal are dropped first. Samples with alpha > R or |beta| > R/2 are
/// dropped. Each remaining sample deposits weight 1 bilinearly over the four
/// bins around its continuous bin coordinate; weight falling outside the
/// image is discarded.
SpinImageDescriptor generate_spin_image(std::span<const SampledPoint> samples,
                                        const OrientedPoint& anchor, double support_radius,
                                        int resolution,
                                        std::optional<double> support_angle_degrees = std::nullopt);

/// Pearson correlation of all pixel pairs, in [-1, 1]; higher is more similar.
/// Zero variance on either side gives -1, except two equal constant images give 1.
/// Throws std::invalid_argument on resolution mismatch.
double pearson_distance(const SpinImageDescriptor& a, const SpinImageDescriptor& b);

/// Spin images for many anchors over one sample cloud. Visits only samples
/// near each support volume, in index order, so results equal
/// generate_spin_image exactly.
class SpinImageGenerator {
public:
    SpinImageGenerator(std::span<const SampledPoint> samples, double support_radius, int resolution,
                       std::optional<double> support_angle_degrees = std::nullopt);

    SpinImageDescriptor generate(const OrientedPoint& anchor) const;
    std::vector<SpinImageDescriptor> generate_all(std::span<const OrientedPoint> anchors) const;

private:
    std::span<const SampledPoint> samples_;
    double support_radius_;
    int resolution_;
    std::optional<double> support_angle_;
    UniformGrid grid_;
};

/// Spin image reduced to zero-mean, unit-norm form so correlation becomes a
/// dot product. Constant images keep a flag and their value for the
/// zero-variance rule.
struct PreparedSpinImage {
    struct Entry {
        std::uint32_t index;
        float value;
    };

    /// Bins scaled by 1 / sqrt(sum of squared deviations).
    std::vector<float> scaled;
    /// Nonzero entries of `scaled`.
    std::vector<Entry> nonzero;
    /// Mean of `scaled`.
    double scaled_mean{0};
    bool constant{false};
    float constant_value{0};

    explicit PreparedSpinImage(const SpinImageDescriptor& image);
};

/// Same value as pearson_distance up to float rounding.
double prepared_correlation(const PreparedSpinImage& a, const PreparedSpinImage& b);

}  // namespace rici
