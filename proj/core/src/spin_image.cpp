#include "rici/spin_image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rici/parallel.hpp"
#include "rici/projection.hpp"

namespace rici {

namespace {

void validate_parameters(double support_radius, int resolution) {
    if (!(support_radius > 0.0)) {
        throw std::invalid_argument("support radius must be positive");
    }
    if (resolution < 2) {
        throw std::invalid_argument("resolution must be at least 2");
    }
}

class SpinAccumulator {
public:
    SpinAccumulator(const OrientedPoint& anchor, double support_radius, int resolution,
                    std::optional<double> support_angle_degrees)
        : basis_(build_basis<double>(anchor)),
          spin_normal_(anchor.normal),
          radius_(support_radius),
          half_(0.5 * support_radius),
          inv_width_(resolution / support_radius),
          out_(resolution, support_radius) {
        // 180 degrees (or more) admits every normal; treat it as no filter so
        // rounding in the dot product cannot reject antiparallel samples.
        if (support_angle_degrees && *support_angle_degrees < 180.0) {
            min_cosine_ = std::cos(*support_angle_degrees * std::numbers::pi / 180.0);
        }
    }

    void add(const SampledPoint& sample) {
        if (min_cosine_ && dot(sample.normal, spin_normal_) < *min_cosine_) {
            return;
        }
        const CylindricalCoord<double> c = basis_.project(sample.position);
        if (c.alpha > radius_ || std::abs(c.beta) > half_) {
            return;
        }
        const double x = c.alpha * inv_width_ - 0.5;
        const double y = (c.beta + half_) * inv_width_ - 0.5;
        const double fx0 = std::floor(x);
        const double fy0 = std::floor(y);
        const double wx = x - fx0;
        const double wy = y - fy0;
        const int x0 = static_cast<int>(fx0);
        const int y0 = static_cast<int>(fy0);
        deposit(y0, x0, (1.0 - wx) * (1.0 - wy));
        deposit(y0, x0 + 1, wx * (1.0 - wy));
        deposit(y0 + 1, x0, (1.0 - wx) * wy);
        deposit(y0 + 1, x0 + 1, wx * wy);
    }

    SpinImageDescriptor take() { return std::move(out_); }

private:
    void deposit(int row, int column, double weight) {
        const int n = out_.resolution;
        if (row < 0 || row >= n || column < 0 || column >= n) {
            return;
        }
        out_.bins[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(column)] += static_cast<float>(weight);
    }

    ProjectionBasis<double> basis_;
    Vec3d spin_normal_;
    double radius_;
    double half_;
    double inv_width_;
    std::optional<double> min_cosine_;
    SpinImageDescriptor out_;
};

}  // namespace

SpinImageDescriptor generate_spin_image(std::span<const SampledPoint> samples,
                                        const OrientedPoint& anchor, double support_radius,
                                        int resolution, std::optional<double> support_angle_degrees) {
    validate_parameters(support_radius, resolution);
    SpinAccumulator acc(anchor, support_radius, resolution, support_angle_degrees);
    for (const auto& s : samples) {
        acc.add(s);
    }
    return acc.take();
}

double pearson_distance(const SpinImageDescriptor& a, const SpinImageDescriptor& b) {
    if (a.resolution != b.resolution || a.bins.size() != b.bins.size()) {
        throw std::invalid_argument("spin images differ in resolution");
    }
    const std::size_t n = a.bins.size();
    const auto is_constant = [](const std::vector<float>& v) {
        return std::all_of(v.begin(), v.end(), [&](float x) { return x == v.front(); });
    };
    const bool a_constant = n == 0 || is_constant(a.bins);
    const bool b_constant = n == 0 || is_constant(b.bins);
    if (a_constant || b_constant) {
        return (a_constant && b_constant && a.bins == b.bins) ? 1.0 : -1.0;
    }
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a.bins[i];
        mean_b += b.bins[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double cov = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.bins[i] - mean_a;
        const double db = b.bins[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (!(var_a > 0.0) || !(var_b > 0.0)) {
        return -1.0;
    }
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

SpinImageGenerator::SpinImageGenerator(std::span<const SampledPoint> samples, double support_radius,
                                       int resolution, std::optional<double> support_angle_degrees)
    : samples_(samples),
      support_radius_(support_radius),
      resolution_(resolution),
      support_angle_(support_angle_degrees),
      grid_([&] {
          std::vector<Vec3d> positions;
          positions.reserve(samples.size());
          for (const auto& s : samples) {
              positions.push_back(s.position);
          }
          return UniformGrid::for_points(positions, support_radius > 0.0 ? support_radius : 1.0);
      }()) {
    validate_parameters(support_radius, resolution);
}

SpinImageDescriptor SpinImageGenerator::generate(const OrientedPoint& anchor) const {
    const double reach = std::sqrt(1.25) * support_radius_ * (1.0 + 1e-9);
    thread_local std::vector<std::uint32_t> candidates;
    grid_.query(anchor.position, reach, candidates);
    SpinAccumulator acc(anchor, support_radius_, resolution_, support_angle_);
    for (const auto index : candidates) {
        acc.add(samples_[index]);
    }
    return acc.take();
}

std::vector<SpinImageDescriptor> SpinImageGenerator::generate_all(
    std::span<const OrientedPoint> anchors) const {
    std::vector<SpinImageDescriptor> out(anchors.size());
    parallel_for(anchors.size(), [&](std::size_t i) { out[i] = generate(anchors[i]); });
    return out;
}

PreparedSpinImage::PreparedSpinImage(const SpinImageDescriptor& image) {
    const std::size_t n = image.bins.size();
    constant = n == 0 || std::all_of(image.bins.begin(), image.bins.end(),
                                     [&](float x) { return x == image.bins.front(); });
    if (constant) {
        constant_value = n == 0 ? 0.0f : image.bins.front();
        return;
    }
    double mean = 0.0;
    for (const float v : image.bins) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double sum_sq = 0.0;
    for (const float v : image.bins) {
        sum_sq += (v - mean) * (v - mean);
    }
    const double inv = 1.0 / std::sqrt(sum_sq);
    scaled.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = static_cast<float>(image.bins[i] * inv);
        if (image.bins[i] != 0.0f) {
            nonzero.push_back({static_cast<std::uint32_t>(i), scaled[i]});
        }
    }
    scaled_mean = mean * inv;
}

double prepared_correlation(const PreparedSpinImage& a, const PreparedSpinImage& b) {
    if (a.constant || b.constant) {
        return (a.constant && b.constant && a.constant_value == b.constant_value) ? 1.0 : -1.0;
    }
    if (a.scaled.size() != b.scaled.size()) {
        throw std::invalid_argument("spin images differ in resolution");
    }
    // sum (a - ma)(b - mb) = sum a b - n ma mb, and a b vanishes wherever a does.
    const float* pb = b.scaled.data();
    double sum = 0.0;
    for (const auto& e : a.nonzero) {
        sum += double(e.value) * double(pb[e.index]);
    }
    sum -= static_cast<double>(a.scaled.size()) * a.scaled_mean * b.scaled_mean;
    return std::clamp(sum, -1.0, 1.0);
}

}  // namespace rici
