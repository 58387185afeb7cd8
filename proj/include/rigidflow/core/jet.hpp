#pragma once

// Forward-mode dual numbers. Nesting Jet<Jet<double,3>,3> gives second
// derivatives, which the Laplacian-based identities need.

#include <array>
#include <cmath>
#include <type_traits>

#include "rigidflow/core/vec.hpp"

namespace rigidflow {

template <class T, int N>
struct Jet {
    T v{};
    std::array<T, N> d{};

    Jet() = default;
    Jet(double x) : v(x) {}  // NOLINT: constants promote implicitly
    template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
    Jet(const T& x) : v(x) {}  // NOLINT
};

template <class T>
struct is_jet : std::false_type {};
template <class T, int N>
struct is_jet<Jet<T, N>> : std::true_type {};

inline double value(double x) { return x; }
template <class T, int N>
double value(const Jet<T, N>& x) { return value(x.v); }

template <class T, int N>
Jet<T, N> operator+(const Jet<T, N>& a, const Jet<T, N>& b) {
    Jet<T, N> r;
    r.v = a.v + b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
}
template <class T, int N>
Jet<T, N> operator-(const Jet<T, N>& a, const Jet<T, N>& b) {
    Jet<T, N> r;
    r.v = a.v - b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
}
template <class T, int N>
Jet<T, N> operator-(const Jet<T, N>& a) {
    Jet<T, N> r;
    r.v = -a.v;
    for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
}
template <class T, int N>
Jet<T, N> operator*(const Jet<T, N>& a, const Jet<T, N>& b) {
    Jet<T, N> r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
}
template <class T, int N>
Jet<T, N> operator/(const Jet<T, N>& a, const Jet<T, N>& b) {
    Jet<T, N> r;
    T inv = T(1.0) / b.v;
    r.v = a.v * inv;
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
    return r;
}

template <class T, int N>
Jet<T, N> operator+(const Jet<T, N>& a, double s) {
    Jet<T, N> r = a;
    r.v = a.v + s;
    return r;
}
template <class T, int N>
Jet<T, N> operator+(double s, const Jet<T, N>& a) { return a + s; }
template <class T, int N>
Jet<T, N> operator-(const Jet<T, N>& a, double s) { return a + (-s); }
template <class T, int N>
Jet<T, N> operator-(double s, const Jet<T, N>& a) { return (-a) + s; }
template <class T, int N>
Jet<T, N> operator*(const Jet<T, N>& a, double s) {
    Jet<T, N> r;
    r.v = a.v * s;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * s;
    return r;
}
template <class T, int N>
Jet<T, N> operator*(double s, const Jet<T, N>& a) { return a * s; }
template <class T, int N>
Jet<T, N> operator/(const Jet<T, N>& a, double s) { return a * (1.0 / s); }
template <class T, int N>
Jet<T, N> operator/(double s, const Jet<T, N>& a) { return Jet<T, N>(s) / a; }

template <class T, int N>
Jet<T, N>& operator+=(Jet<T, N>& a, const Jet<T, N>& b) { return a = a + b; }
template <class T, int N>
Jet<T, N>& operator-=(Jet<T, N>& a, const Jet<T, N>& b) { return a = a - b; }
template <class T, int N>
Jet<T, N>& operator*=(Jet<T, N>& a, const Jet<T, N>& b) { return a = a * b; }

template <class T, int N>
bool operator<(const Jet<T, N>& a, double s) { return value(a) < s; }
template <class T, int N>
bool operator>(const Jet<T, N>& a, double s) { return value(a) > s; }
template <class T, int N>
bool operator<=(const Jet<T, N>& a, double s) { return value(a) <= s; }
template <class T, int N>
bool operator>=(const Jet<T, N>& a, double s) { return value(a) >= s; }

// chain rule helper: f(a) with f(a.v)=fv and f'(a.v)=dfv
template <class T, int N>
Jet<T, N> chain(const Jet<T, N>& a, const T& fv, const T& dfv) {
    Jet<T, N> r;
    r.v = fv;
    for (int i = 0; i < N; ++i) r.d[i] = dfv * a.d[i];
    return r;
}

template <class T, int N>
Jet<T, N> sqrt(const Jet<T, N>& a) {
    using std::sqrt;
    T s = sqrt(a.v);
    return chain(a, s, T(0.5) / s);
}
template <class T, int N>
Jet<T, N> exp(const Jet<T, N>& a) {
    using std::exp;
    T e = exp(a.v);
    return chain(a, e, e);
}
template <class T, int N>
Jet<T, N> log(const Jet<T, N>& a) {
    using std::log;
    return chain(a, log(a.v), T(1.0) / a.v);
}
template <class T, int N>
Jet<T, N> sin(const Jet<T, N>& a) {
    using std::cos;
    using std::sin;
    return chain(a, sin(a.v), cos(a.v));
}
template <class T, int N>
Jet<T, N> cos(const Jet<T, N>& a) {
    using std::cos;
    using std::sin;
    return chain(a, cos(a.v), -sin(a.v));
}
template <class T, int N>
Jet<T, N> pow(const Jet<T, N>& a, double p) {
    using std::pow;
    return chain(a, pow(a.v, p), p * pow(a.v, p - 1.0));
}

// integer power by repeated multiplication, exact for polynomials
template <class T>
T ipow(const T& x, int n) {
    T r(1.0);
    for (int i = 0; i < n; ++i) r = r * x;
    return r;
}

// ---------------------------------------------------------------------------
// Evaluation of templated vector fields: f(Vec3<S>) -> Vec3<S>.

struct FieldJet1 {
    Vec3d u;
    Mat3 grad;  // grad(i,j) = d u_i / d x_j
};

struct FieldJet2 {
    Vec3d u;
    Mat3 grad;
    std::array<Mat3, 3> hess;  // hess[i](j,k) = d2 u_i / dx_j dx_k
    Vec3d laplacian() const { return {hess[0].trace(), hess[1].trace(), hess[2].trace()}; }
};

template <class F>
Vec3d eval_value(const F& f, const Vec3d& x) {
    return to_eigen(f(Vec3<double>{x[0], x[1], x[2]}));
}

template <class F>
FieldJet1 eval_grad(const F& f, const Vec3d& x) {
    using J = Jet<double, 3>;
    Vec3<J> X;
    for (int i = 0; i < 3; ++i) {
        X[i].v = x[i];
        X[i].d[i] = 1.0;
    }
    Vec3<J> U = f(X);
    FieldJet1 out;
    for (int i = 0; i < 3; ++i) {
        out.u[i] = U[i].v;
        for (int j = 0; j < 3; ++j) out.grad(i, j) = U[i].d[j];
    }
    return out;
}

template <class F>
FieldJet2 eval_hess(const F& f, const Vec3d& x) {
    using J1 = Jet<double, 3>;
    using J2 = Jet<J1, 3>;
    Vec3<J2> X;
    for (int i = 0; i < 3; ++i) {
        X[i].v.v = x[i];
        X[i].v.d[i] = 1.0;
        X[i].d[i].v = 1.0;
    }
    Vec3<J2> U = f(X);
    FieldJet2 out;
    for (int i = 0; i < 3; ++i) {
        out.u[i] = U[i].v.v;
        for (int j = 0; j < 3; ++j) {
            out.grad(i, j) = U[i].d[j].v;
            for (int k = 0; k < 3; ++k) out.hess[i](j, k) = U[i].d[j].d[k];
        }
    }
    return out;
}

// scalar potentials: phi(Vec3<S>) -> S
template <class F>
std::pair<double, Vec3d> eval_scalar_grad(const F& f, const Vec3d& x) {
    using J = Jet<double, 3>;
    Vec3<J> X;
    for (int i = 0; i < 3; ++i) {
        X[i].v = x[i];
        X[i].d[i] = 1.0;
    }
    J p = f(X);
    return {p.v, Vec3d(p.d[0], p.d[1], p.d[2])};
}

}  // namespace rigidflow
