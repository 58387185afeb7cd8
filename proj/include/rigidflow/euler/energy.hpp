#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rigidflow/core/gauss.hpp"
#include "rigidflow/euler/reconstruct.hpp"

namespace rigidflow::euler {

// Fluid rule around a sphere of radius a, refined where the particles sit.
// Spherical coordinates about the particle centroid direction: composite
// Gauss panels in r and theta of width ~ panel_eps * eps over the particle
// band (padded by pad * eps), coarse panels elsewhere, the periodic
// trapezoid in phi, and the s = R/r map beyond the truncation radius.
struct AdaptedRuleOptions {
    int order = 8;            // Gauss points per fine panel
    int coarse_order = 4;
    double panel_eps = 2.0;   // fine panel width in units of eps
    double pad = 5.0;         // band padding in units of eps
    double coarse_r = 0.5;    // coarse radial panel width
    double coarse_theta = 0.4;
    int n_phi = 128;
    double truncation = 4.0;
    int far_order = 10;
};

namespace detail {
inline void add_panels(Rule1D& out, double a, double b, double width, int order) {
    if (!(b > a)) return;
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int k = 0; k < n; ++k) {
        Rule1D g = gauss_legendre(order, a + (b - a) * k / n, a + (b - a) * (k + 1) / n);
        out.x.insert(out.x.end(), g.x.begin(), g.x.end());
        out.w.insert(out.w.end(), g.w.begin(), g.w.end());
    }
}
}  // namespace detail

inline geometry::VolumeRule adapted_fluid_rule(double a, const VortexField& w, AdaptedRuleOptions o = {}) {
    Vec3d pole = Vec3d::UnitZ();
    if (w.size()) {
        Vec3d c = Vec3d::Zero();
        for (const auto& x : w.x) c += x;
        if (c.norm() > 1e-9 * w.size()) pole = c.normalized();
    }
    Vec3d e1 = std::abs(pole[0]) < 0.9 ? Vec3d::UnitX() : Vec3d::UnitY();
    e1 = (e1 - e1.dot(pole) * pole).normalized();
    Vec3d e2 = pole.cross(e1);
    double rmin = 1e300, rmax = 0, tmin = M_PI, tmax = 0;
    for (const auto& x : w.x) {
        double r = x.norm();
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        double t = std::acos(std::clamp(x.dot(pole) / r, -1.0, 1.0));
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    const double R = std::max(o.truncation, w.size() ? rmax + 2 * o.pad * w.eps : o.truncation);
    Rule1D rr, tt;
    double fw = o.panel_eps * w.eps;
    if (w.size()) {
        double r0 = std::max(a, rmin - o.pad * w.eps), r1 = std::min(R, rmax + o.pad * w.eps);
        detail::add_panels(rr, a, r0, o.coarse_r, o.coarse_order);
        detail::add_panels(rr, r0, r1, fw, o.order);
        detail::add_panels(rr, r1, R, o.coarse_r, o.coarse_order);
        double dt = o.pad * w.eps / std::max(rmin, a);
        double t0 = std::max(0.0, tmin - dt), t1 = std::min(M_PI, tmax + dt);
        detail::add_panels(tt, 0, t0, o.coarse_theta, o.coarse_order);
        detail::add_panels(tt, t0, t1, fw / std::max(rmin, a), o.order);
        detail::add_panels(tt, t1, M_PI, o.coarse_theta, o.coarse_order);
    } else {
        detail::add_panels(rr, a, R, o.coarse_r, o.order);
        detail::add_panels(tt, 0, M_PI, o.coarse_theta, o.order);
    }
    Rule1D far = gauss_legendre(o.far_order, 0.0, 1.0);
    geometry::VolumeRule v;
    const double dphi = 2 * M_PI / o.n_phi;
    for (std::size_t i = 0; i < tt.x.size(); ++i) {
        double st = std::sin(tt.x[i]), ct = std::cos(tt.x[i]);
        for (int k = 0; k < o.n_phi; ++k) {
            double ph = (k + 0.5) * dphi;
            Vec3d d = ct * pole + st * (std::cos(ph) * e1 + std::sin(ph) * e2);
            double wa = tt.w[i] * st * dphi;
            for (std::size_t j = 0; j < rr.x.size(); ++j) {
                v.x.push_back(rr.x[j] * d);
                v.w.push_back(wa * rr.w[j] * rr.x[j] * rr.x[j]);
            }
            for (std::size_t j = 0; j < far.x.size(); ++j) {
                double s = far.x[j];
                v.x.push_back((R / s) * d);
                v.w.push_back(wa * far.w[j] * R * R * R / std::pow(s, 4));
            }
        }
    }
    return v;
}

// ||u||_H^2 = int_F |u|^2 + m |l|^2 + J r.r on a given rule
inline double measure_energy(const EulerGeometry& g, const VortexField& w, const Vec3d& ell, const Vec3d& rot,
                             const geometry::VolumeRule& rule) {
    Reconstruction rec(g, w, ell, rot);
    double f = chunked_sum<double>(rule.size(), [&](std::size_t q) { return rule.w[q] * rec.velocity(rule.x[q]).squaredNorm(); }, 0.0);
    return f + rigid_energy(g, ell, rot);
}

}  // namespace rigidflow::euler
