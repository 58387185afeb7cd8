#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rigidflow/core/parallel.hpp"
#include "rigidflow/core/vec.hpp"
#include "rigidflow/forms/field.hpp"

namespace rigidflow::euler {

using forms::Sample;

// Particle strengths alpha_p = omega_p vol_p; eps is the blob radius.
struct VortexField {
    std::vector<Vec3d> x, alpha;
    std::vector<double> vol;
    double eps = 0.1;

    std::size_t size() const { return x.size(); }
    Vec3d total_strength() const {
        Vec3d s = Vec3d::Zero();
        for (const auto& a : alpha) s += a;
        return s;
    }
    // linear impulse 1/2 sum x ^ alpha
    Vec3d impulse() const {
        Vec3d s = Vec3d::Zero();
        for (std::size_t p = 0; p < size(); ++p) s += 0.5 * x[p].cross(alpha[p]);
        return s;
    }
};

// Winckelmans-Leonard algebraic kernel:
//   u(x) = 1/(4 pi) sum alpha_p ^ d f(|d|^2),  f(s) = (s + 5/2 e^2) / (s + e^2)^(5/2)
namespace detail {
inline void wl_factors(double s, double e2, double& f, double& df) {
    double q = 1.0 / (s + e2);
    double q25 = q * q * std::sqrt(q);
    f = (s + 2.5 * e2) * q25;
    df = q25 - 2.5 * (s + 2.5 * e2) * q25 * q;
}
}  // namespace detail

inline Vec3d biot_savart(const VortexField& w, const Vec3d& x) {
    const double e2 = w.eps * w.eps;
    Vec3d u = Vec3d::Zero();
    for (std::size_t p = 0; p < w.size(); ++p) {
        Vec3d d = x - w.x[p];
        double f, df;
        detail::wl_factors(d.squaredNorm(), e2, f, df);
        u += f * w.alpha[p].cross(d);
    }
    return u / (4 * M_PI);
}

// value and gradient, grad(i,j) = d u_i / d x_j
inline Sample biot_savart_grad(const VortexField& w, const Vec3d& x) {
    const double e2 = w.eps * w.eps;
    Sample s;
    for (std::size_t p = 0; p < w.size(); ++p) {
        Vec3d d = x - w.x[p];
        double f, df;
        detail::wl_factors(d.squaredNorm(), e2, f, df);
        Vec3d c = w.alpha[p].cross(d);
        s.u += f * c;
        s.grad += f * skew(w.alpha[p]) + 2 * df * c * d.transpose();
    }
    s.u /= 4 * M_PI;
    s.grad /= 4 * M_PI;
    return s;
}

// smoothing function of the kernel, zeta(rho) = 15/(8 pi) (rho^2 + 1)^(-7/2)
inline Vec3d mollified_vorticity(const VortexField& w, const Vec3d& x) {
    const double e = w.eps;
    Vec3d o = Vec3d::Zero();
    for (std::size_t p = 0; p < w.size(); ++p) {
        double r2 = (x - w.x[p]).squaredNorm() / (e * e);
        o += w.alpha[p] * (15.0 / (8 * M_PI) * std::pow(r2 + 1, -3.5) / (e * e * e));
    }
    return o;
}

// Vortex ring: centre c, unit axis n (direction of self-induced motion for
// gamma > 0), ring radius R, core radius sigma with the compact profile
//   omega = gamma 4/(pi sigma^2) (1 - (rho/sigma)^2)^3,  rho < sigma,
// discretised on a square lattice of spacing h in each meridional section.
struct RingSpec {
    Vec3d centre = Vec3d(0, 0, 2.5);
    Vec3d axis = Vec3d(0, 0, -1);
    double radius = 0.6;
    double core = 0.3;
    double circulation = 1.0;
    double spacing = 0.1;
    double eps_factor = 1.5;  // eps = eps_factor * spacing
};

inline VortexField seed_ring(const RingSpec& s) {
    if (!(s.radius > s.core && s.core > 0 && s.spacing > 0)) throw std::invalid_argument("ring: need radius > core > 0 and spacing > 0");
    VortexField w;
    w.eps = s.eps_factor * s.spacing;
    Vec3d n = s.axis.normalized();
    Vec3d e1 = (std::abs(n[0]) < 0.9 ? Vec3d::UnitX() : Vec3d::UnitY());
    e1 = (e1 - e1.dot(n) * n).normalized();
    Vec3d e2 = n.cross(e1);
    const double h = s.spacing;
    const int nphi = std::max(8, static_cast<int>(std::ceil(2 * M_PI * s.radius / h)));
    const double dphi = 2 * M_PI / nphi;
    const int nh = static_cast<int>(std::ceil(s.core / h));
    const double peak = s.circulation * 4 / (M_PI * s.core * s.core);
    for (int k = 0; k < nphi; ++k) {
        double phi = (k + 0.5) * dphi;
        Vec3d er = std::cos(phi) * e1 + std::sin(phi) * e2;
        Vec3d et = n.cross(er);  // +theta direction about the axis
        for (int i = -nh; i < nh; ++i)
            for (int j = -nh; j < nh; ++j) {
                double a = (i + 0.5) * h, b = (j + 0.5) * h;  // radial, axial offsets
                double rho2 = (a * a + b * b) / (s.core * s.core);
                if (rho2 >= 1) continue;
                double om = peak * std::pow(1 - rho2, 3);
                double vol = h * h * (s.radius + a) * dphi;
                w.x.push_back(s.centre + (s.radius + a) * er + b * n);
                // counter-clockwise about n moves the ring along n
                w.alpha.push_back(om * vol * et);
                w.vol.push_back(vol);
            }
    }
    return w;
}

}  // namespace rigidflow::euler
