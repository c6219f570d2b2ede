#include "rici/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace rici {

template <std::floating_point T>
ProjectionBasis<T> build_basis(const OrientedPoint& anchor) {
    const Vec3d n = anchor.normal;
    if (!(squared_length(n) > 0.0)) {
        throw std::invalid_argument("build_basis: spin normal has zero length");
    }
    ProjectionBasis<T> basis;
    basis.origin = Vec3<T>(anchor.position);

    const double first_len = std::hypot(n.x, n.y);
    basis.first_rotation_identity = first_len < kIdentityRotationEpsilon;
    // x component of the normal once the first rotation has been applied.
    double rotated_x = n.x;
    if (!basis.first_rotation_identity) {
        basis.na_x = static_cast<T>(n.x / first_len);
        basis.na_y = static_cast<T>(n.y / first_len);
        rotated_x = first_len;
    }

    const double second_len = std::hypot(rotated_x, n.z);
    basis.second_rotation_identity = second_len < kIdentityRotationEpsilon ||
                                      (std::abs(rotated_x) < kIdentityRotationEpsilon && n.z > 0.0);
    if (!basis.second_rotation_identity) {
        basis.nb_x = static_cast<T>(rotated_x / second_len);
        basis.nb_z = static_cast<T>(n.z / second_len);
    }
    return basis;
}

template ProjectionBasis<float> build_basis<float>(const OrientedPoint&);
template ProjectionBasis<double> build_basis<double>(const OrientedPoint&);

template <std::floating_point T>
CylindricalCoord<T> project_oracle(const OrientedPoint& anchor, const Vec3<T>& p) {
    const Vec3<T> n = normalized(Vec3<T>(anchor.normal));
    if (!(squared_length(n) > T(0))) {
        throw std::invalid_argument("project_oracle: spin normal has zero length");
    }
    const Vec3<T> helper = std::abs(n.x) < T(0.9) ? Vec3<T>{1, 0, 0} : Vec3<T>{0, 1, 0};
    const Vec3<T> x_axis = normalized(cross(helper, n));
    const Vec3<T> y_axis = cross(n, x_axis);
    const T frame[3][3] = {{x_axis.x, x_axis.y, x_axis.z},
                           {y_axis.x, y_axis.y, y_axis.z},
                           {n.x, n.y, n.z}};
    const Vec3<T> d = p - Vec3<T>(anchor.position);
    T local[3];
    for (int row = 0; row < 3; ++row) {
        local[row] = frame[row][0] * d.x + frame[row][1] * d.y + frame[row][2] * d.z;
    }
    return {std::sqrt(local[0] * local[0] + local[1] * local[1]), local[2]};
}

template CylindricalCoord<float> project_oracle<float>(const OrientedPoint&, const Vec3f&);
template CylindricalCoord<double> project_oracle<double>(const OrientedPoint&, const Vec3d&);

}  // namespace rici
