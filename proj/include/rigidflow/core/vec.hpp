#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace rigidflow {

// Small 3-vector usable with any scalar, including the autodiff jets.
template <class T>
struct Vec3 {
    std::array<T, 3> c{};

    Vec3() = default;
    Vec3(T x, T y, T z) : c{x, y, z} {}

    T& operator[](int i) { return c[i]; }
    const T& operator[](int i) const { return c[i]; }

    Vec3& operator+=(const Vec3& o) {
        for (int i = 0; i < 3; ++i) c[i] = c[i] + o.c[i];
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        for (int i = 0; i < 3; ++i) c[i] = c[i] - o.c[i];
        return *this;
    }
};

template <class T>
Vec3<T> operator+(Vec3<T> a, const Vec3<T>& b) { return a += b; }
template <class T>
Vec3<T> operator-(Vec3<T> a, const Vec3<T>& b) { return a -= b; }
template <class T>
Vec3<T> operator-(const Vec3<T>& a) { return {-a[0], -a[1], -a[2]}; }

template <class T, class U>
Vec3<T> operator*(const U& s, const Vec3<T>& a) { return {a[0] * s, a[1] * s, a[2] * s}; }
template <class T, class U>
Vec3<T> operator*(const Vec3<T>& a, const U& s) { return {a[0] * s, a[1] * s, a[2] * s}; }
template <class T, class U>
Vec3<T> operator/(const Vec3<T>& a, const U& s) { return {a[0] / s, a[1] / s, a[2] / s}; }

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class T>
T norm2(const Vec3<T>& a) { return dot(a, a); }

// constant-coefficient cross product, keeps the jet type of x
template <class T>
Vec3<T> cross(const Eigen::Vector3d& a, const Vec3<T>& x) {
    return {x[2] * a[1] - x[1] * a[2], x[0] * a[2] - x[2] * a[0], x[1] * a[0] - x[0] * a[1]};
}

template <class T>
Vec3<T> lift(const Eigen::Vector3d& a) { return {T(a[0]), T(a[1]), T(a[2])}; }

inline Eigen::Vector3d to_eigen(const Vec3<double>& a) { return {a[0], a[1], a[2]}; }
inline Vec3<double> from_eigen(const Eigen::Vector3d& a) { return {a[0], a[1], a[2]}; }

using Vec3d = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline double det3(const Vec3d& a, const Vec3d& b, const Vec3d& c) { return a.dot(b.cross(c)); }

inline Mat3 skew(const Vec3d& r) {
    Mat3 s;
    s << 0, -r[2], r[1], r[2], 0, -r[0], -r[1], r[0], 0;
    return s;
}

}  // namespace rigidflow
