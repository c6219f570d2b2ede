#include "rici/shape_context.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rici/parallel.hpp"
#include "rici/projection.hpp"

namespace rici {

void ShapeContextParams::validate() const {
    if (azimuth_bins < 1 || elevation_bins < 1 || radial_bins < 1) {
        throw std::invalid_argument("shape context bin counts must be >= 1");
    }
    if (!(r_min > 0.0) || !(r_min < r_max)) {
        throw std::invalid_argument("shape context radii must satisfy 0 < r_min < r_max");
    }
}

std::vector<double> radial_boundaries(double r_min, double r_max, int radial_bins) {
    if (!(r_min > 0.0) || !(r_min < r_max) || radial_bins < 1) {
        throw std::invalid_argument("radial_boundaries: need 0 < r_min < r_max and L >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(radial_bins) + 1);
    const double log_min = std::log(r_min);
    const double log_ratio = std::log(r_max / r_min);
    for (int l = 0; l <= radial_bins; ++l) {
        out[static_cast<std::size_t>(l)] = std::exp(log_min + (double(l) / radial_bins) * log_ratio);
    }
    // Pin the ends so the shell test matches r_min and r_max exactly.
    out.front() = r_min;
    out.back() = r_max;
    return out;
}

std::vector<std::uint32_t> local_densities(std::span<const SampledPoint> samples, double radius) {
    std::vector<Vec3d> positions;
    positions.reserve(samples.size());
    for (const auto& s : samples) {
        positions.push_back(s.position);
    }
    const UniformGrid grid = UniformGrid::for_points(positions, radius > 0.0 ? radius : 1.0);
    std::vector<std::uint32_t> out(samples.size(), 1);
    const double r2 = radius * radius;
    parallel_for(samples.size(), [&](std::size_t i) {
        std::vector<std::uint32_t> candidates;
        grid.query(positions[i], radius, candidates);
        std::uint32_t count = 0;
        for (const auto c : candidates) {
            if (squared_length(positions[c] - positions[i]) <= r2) {
                ++count;
            }
        }
        out[i] = std::max<std::uint32_t>(1, count);
    });
    return out;
}

bool shape_context_bin(const Vec3d& aligned, const ShapeContextParams& params,
                       std::span<const double> boundaries, ShapeContextBin& bin) {
    const double d = length(aligned);
    if (!(d > params.r_min) || d > params.r_max) {
        return false;
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double azimuth = std::atan2(aligned.y, aligned.x);
    if (azimuth < 0.0) {
        azimuth += two_pi;
    }
    bin.azimuth = std::clamp(static_cast<int>(azimuth / (two_pi / params.azimuth_bins)), 0,
                             params.azimuth_bins - 1);
    const double elevation = std::acos(std::clamp(aligned.z / d, -1.0, 1.0));
    bin.elevation = std::clamp(static_cast<int>(elevation / (std::numbers::pi / params.elevation_bins)),
                               0, params.elevation_bins - 1);
    const int L = params.radial_bins;
    int l = static_cast<int>(std::ceil(L * std::log(d / params.r_min) / std::log(params.r_max / params.r_min))) - 1;
    l = std::clamp(l, 0, L - 1);
    // Shells are open below, closed above.
    while (l > 0 && d <= boundaries[static_cast<std::size_t>(l)]) {
        --l;
    }
    while (l < L - 1 && d > boundaries[static_cast<std::size_t>(l) + 1]) {
        ++l;
    }
    bin.radial = l;
    return true;
}

double shape_context_bin_volume(const ShapeContextParams& params, std::span<const double> boundaries,
                                int elevation, int radial) {
    const double step = std::numbers::pi / params.elevation_bins;
    const double cos_band = std::cos(elevation * step) - std::cos((elevation + 1) * step);
    const double r0 = boundaries[static_cast<std::size_t>(radial)];
    const double r1 = boundaries[static_cast<std::size_t>(radial) + 1];
    const double sector = 2.0 * std::numbers::pi / params.azimuth_bins;
    return sector * cos_band * (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
}

namespace {

class ShapeContextAccumulator {
public:
    ShapeContextAccumulator(const OrientedPoint& anchor, const ShapeContextParams& params)
        : basis_(build_basis<double>(anchor)),
          boundaries_(radial_boundaries(params.r_min, params.r_max, params.radial_bins)),
          out_(params) {
        inv_cbrt_volume_.resize(static_cast<std::size_t>(params.elevation_bins) *
                                static_cast<std::size_t>(params.radial_bins));
        for (int k = 0; k < params.elevation_bins; ++k) {
            for (int l = 0; l < params.radial_bins; ++l) {
                inv_cbrt_volume_[static_cast<std::size_t>(k * params.radial_bins + l)] =
                    1.0 / std::cbrt(shape_context_bin_volume(params, boundaries_, k, l));
            }
        }
    }

    void add(const SampledPoint& sample, std::uint32_t density) {
        ShapeContextBin bin;
        if (!shape_context_bin(basis_.align(sample.position), out_.params, boundaries_, bin)) {
            return;
        }
        const double inv_volume =
            inv_cbrt_volume_[static_cast<std::size_t>(bin.elevation * out_.params.radial_bins + bin.radial)];
        out_.bins[out_.index(bin.azimuth, bin.elevation, bin.radial)] +=
            static_cast<float>(inv_volume / std::max<std::uint32_t>(1, density));
    }

    ShapeContextDescriptor take() { return std::move(out_); }

private:
    ProjectionBasis<double> basis_;
    std::vector<double> boundaries_;
    std::vector<double> inv_cbrt_volume_;
    ShapeContextDescriptor out_;
};

}  // namespace

ShapeContextDescriptor generate_shape_context(std::span<const SampledPoint> samples,
                                              std::span<const std::uint32_t> densities,
                                              const OrientedPoint& anchor,
                                              const ShapeContextParams& params) {
    params.validate();
    if (densities.size() != samples.size()) {
        throw std::invalid_argument("generate_shape_context: one density per sample required");
    }
    ShapeContextAccumulator acc(anchor, params);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        acc.add(samples[i], densities[i]);
    }
    return acc.take();
}

ShapeContextDescriptor generate_shape_context(std::span<const SampledPoint> samples,
                                              const OrientedPoint& anchor,
                                              const ShapeContextParams& params,
                                              double local_density_radius) {
    const auto densities = local_densities(samples, local_density_radius);
    return generate_shape_context(samples, densities, anchor, params);
}

namespace {

void check_same_params(const ShapeContextParams& a, const ShapeContextParams& b) {
    if (!(a == b)) {
        throw std::invalid_argument("shape context descriptors use different parameters");
    }
}

std::vector<double> l2_normalized(const std::vector<float>& bins) {
    double sum_sq = 0.0;
    for (const float v : bins) {
        sum_sq += double(v) * double(v);
    }
    std::vector<double> out(bins.begin(), bins.end());
    if (sum_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sum_sq);
        for (auto& v : out) {
            v *= inv;
        }
    }
    return out;
}

}  // namespace

double shape_context_distance(const ShapeContextDescriptor& needle,
                              const ShapeContextDescriptor& haystack) {
    check_same_params(needle.params, haystack.params);
    const auto n = l2_normalized(needle.bins);
    const auto h = l2_normalized(haystack.bins);
    const auto J = static_cast<std::size_t>(needle.params.azimuth_bins);
    const std::size_t block = n.size() / J;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < J; ++shift) {
        double sum = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            const double* a = &n[j * block];
            const double* b = &h[((j + shift) % J) * block];
            for (std::size_t i = 0; i < block; ++i) {
                const double d = a[i] - b[i];
                sum += d * d;
            }
        }
        best = std::min(best, sum);
    }
    return std::sqrt(best);
}

ShapeContextGenerator::ShapeContextGenerator(std::span<const SampledPoint> samples,
                                             const ShapeContextParams& params,
                                             double local_density_radius)
    : samples_(samples),
      params_(params),
      densities_(local_densities(samples, local_density_radius)),
      grid_([&] {
          std::vector<Vec3d> positions;
          positions.reserve(samples.size());
          for (const auto& s : samples) {
              positions.push_back(s.position);
          }
          return UniformGrid::for_points(positions, params.r_max > 0.0 ? params.r_max : 1.0);
      }()) {
    params_.validate();
}

ShapeContextDescriptor ShapeContextGenerator::generate(const OrientedPoint& anchor) const {
    thread_local std::vector<std::uint32_t> candidates;
    grid_.query(anchor.position, params_.r_max * (1.0 + 1e-9) + 1e-12, candidates);
    ShapeContextAccumulator acc(anchor, params_);
    for (const auto index : candidates) {
        acc.add(samples_[index], densities_[index]);
    }
    return acc.take();
}

std::vector<ShapeContextDescriptor> ShapeContextGenerator::generate_all(
    std::span<const OrientedPoint> anchors) const {
    std::vector<ShapeContextDescriptor> out(anchors.size());
    parallel_for(anchors.size(), [&](std::size_t i) { out[i] = generate(anchors[i]); });
    return out;
}

PreparedShapeContext::PreparedShapeContext(const ShapeContextDescriptor& d) : params(d.params) {
    const auto n = l2_normalized(d.bins);
    const auto J = static_cast<std::size_t>(params.azimuth_bins);
    const std::size_t block = n.size() / J;
    by_block.assign(n.size(), 0.0f);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t b = 0; b < block; ++b) {
            const float v = static_cast<float>(n[j * block + b]);
            by_block[b * J + j] = v;
            norm_squared += double(v) * double(v);
            if (v != 0.0f) {
                nonzero.push_back({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(j), v});
            }
        }
    }
}

double prepared_shape_context_distance(const PreparedShapeContext& needle,
                                       const PreparedShapeContext& haystack) {
    check_same_params(needle.params, haystack.params);
    // |a - shift_s(b)|^2 = |a|^2 + |b|^2 - 2 <a, shift_s(b)>; only nonzero needle
    // bins contribute to the J shifted dot products.
    const auto J = static_cast<std::size_t>(needle.params.azimuth_bins);
    constexpr std::size_t kMaxInline = 64;
    float inline_dots[kMaxInline] = {};
    std::vector<float> heap_dots;
    float* dots = inline_dots;
    if (J > kMaxInline) {
        heap_dots.assign(J, 0.0f);
        dots = heap_dots.data();
    }
    const float* h = haystack.by_block.data();
    for (const auto& e : needle.nonzero) {
        const float* cell = h + static_cast<std::size_t>(e.block) * J;
        const std::size_t j = e.azimuth;
        // Shift s reads azimuth (j + s) mod J: two contiguous runs.
        const std::size_t first = J - j;
        for (std::size_t s = 0; s < first; ++s) {
            dots[s] += e.value * cell[j + s];
        }
        for (std::size_t s = first; s < J; ++s) {
            dots[s] += e.value * cell[j + s - J];
        }
    }
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < J; ++s) {
        best_dot = std::max(best_dot, double(dots[s]));
    }
    return std::sqrt(std::max(0.0, needle.norm_squared + haystack.norm_squared - 2.0 * best_dot));
}

}  // namespace rici
