#pragma once

#include <concepts>
#include <cstddef>
#include <cmath>

#include "rici/mesh.hpp"
#include "rici/prng.hpp"
#include "rici/vec3.hpp"

namespace rici {

/// alpha: distance to the central axis. beta: signed offset along it from the spin vertex.
template <std::floating_point T>
struct CylindricalCoord {
    T alpha{0};
    T beta{0};
};

/// Below this length a rotation's 2-vector is treated as zero and the rotation skipped.
inline constexpr double kIdentityRotationEpsilon = 1e-12;

/// Per-anchor coefficients of the two-rotation alignment.
///
/// The first rotation (about z) brings the spin normal into the xz-plane, the
/// second (about y) brings it onto the z-axis. Each rotation is stored as the
/// normalized 2-vector whose components are its cosine and sine. The second
/// rotation is derived from the normal after the first one has been applied,
/// i.e. from (sqrt(nx^2 + ny^2), nz); that is what makes normals with negative
/// x components land on +z.
template <std::floating_point T>
struct ProjectionBasis {
    T na_x{1};
    T na_y{0};
    T nb_x{0};
    T nb_z{1};
    Vec3<T> origin{};
    bool first_rotation_identity{true};
    bool second_rotation_identity{true};

    /// Point in the aligned frame: spin vertex at the origin, spin normal on +z.
    Vec3<T> align(const Vec3<T>& p) const {
        const T px = p.x - origin.x;
        const T py = p.y - origin.y;
        const T pz = p.z - origin.z;
        T rx = px;
        T ry = py;
        if (!first_rotation_identity) {
            rx = na_x * px + na_y * py;
            ry = -na_y * px + na_x * py;
        }
        if (second_rotation_identity) {
            return {rx, ry, pz};
        }
        return {nb_z * rx - nb_x * pz, ry, nb_x * rx + nb_z * pz};
    }

    CylindricalCoord<T> project(const Vec3<T>& p) const {
        const Vec3<T> t = align(p);
        return {std::sqrt(t.x * t.x + t.y * t.y), t.z};
    }
};

/// Throws std::invalid_argument for a zero normal. The normal is expected to be
/// unit length; it is not renormalized.
template <std::floating_point T>
ProjectionBasis<T> build_basis(const OrientedPoint& anchor);

extern template ProjectionBasis<float> build_basis<float>(const OrientedPoint&);
extern template ProjectionBasis<double> build_basis<double>(const OrientedPoint&);

template <std::floating_point T>
CylindricalCoord<T> project(const ProjectionBasis<T>& basis, const Vec3<T>& p) {
    return basis.project(p);
}

/// Reference projection: builds an orthonormal frame around the spin normal
/// with cross products on every call and multiplies by the 3x3 frame matrix.
template <std::floating_point T>
CylindricalCoord<T> project_oracle(const OrientedPoint& anchor, const Vec3<T>& p);

extern template CylindricalCoord<float> project_oracle<float>(const OrientedPoint&, const Vec3f&);
extern template CylindricalCoord<double> project_oracle<double>(const OrientedPoint&, const Vec3d&);

struct ProjectionBenchResult {
    std::size_t count{0};
    double two_rotation_seconds{0};
    double oracle_seconds{0};
    /// Sum of alpha + beta over all points, per path. Identical seeds give identical values.
    double two_rotation_checksum{0};
    double oracle_checksum{0};
    /// Largest |alpha| or |beta| difference between the paths on the verified subsample.
    double max_subsample_deviation{0};
};

/// Projects `count` random points (32-bit) against one random anchor through
/// both paths. The two-rotation path reuses one precomputed basis; the oracle
/// path rebuilds its frame per point. Only projection time is measured.
ProjectionBenchResult bench_projection(std::size_t count, Prng rng);

}  // namespace rici
