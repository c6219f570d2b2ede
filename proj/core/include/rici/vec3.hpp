#pragma once

#include <cmath>
#include <ostream>

namespace rici {

/// Plain 3-component vector. Used for both positions and directions.
template <typename T>
struct Vec3 {
    T x{0};
    T y{0};
    T z{0};

    constexpr Vec3() = default;
    constexpr Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

    template <typename U>
    constexpr explicit Vec3(const Vec3<U>& other)
        : x(static_cast<T>(other.x)), y(static_cast<T>(other.y)), z(static_cast<T>(other.z)) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(T s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(T s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(T s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    constexpr bool operator==(const Vec3&) const = default;

    constexpr T operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

template <typename T>
constexpr Vec3<T> operator*(T s, const Vec3<T>& v) {
    return v * s;
}

template <typename T>
constexpr T dot(const Vec3<T>& a, const Vec3<T>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
constexpr Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
constexpr T squared_length(const Vec3<T>& v) {
    return dot(v, v);
}

template <typename T>
T length(const Vec3<T>& v) {
    return std::sqrt(dot(v, v));
}

/// Returns the zero vector when `v` has zero length.
template <typename T>
Vec3<T> normalized(const Vec3<T>& v) {
    const T len = length(v);
    return len > T(0) ? v / len : Vec3<T>{};
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const Vec3<T>& v) {
    return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

using Vec3f = Vec3<float>;
using Vec3d = Vec3<double>;

}  // namespace rici
