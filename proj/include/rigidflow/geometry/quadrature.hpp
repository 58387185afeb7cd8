#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidflow/core/gauss.hpp"
#include "rigidflow/geometry/body.hpp"
#include "rigidflow/geometry/bvh.hpp"

namespace rigidflow::geometry {

struct SurfaceRule {
    std::vector<Vec3d> x;
    std::vector<double> w;
    std::vector<Vec3d> n;  // unit, pointing out of the body into the fluid
    std::size_t size() const { return x.size(); }
};

struct VolumeRule {
    std::vector<Vec3d> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Fluid nodes cover [boundary, R_trunc] with composite Gauss-Legendre and
// [R_trunc, inf) through s = R_trunc/|x|. The far part integrates
// r^-k Laurent integrands exactly for k >= 4 given enough points; anything
// decaying slower than |x|^-3 is not integrable anyway.
struct QuadratureRule {
    SurfaceRule surface;
    VolumeRule fluid;
    double truncation_radius = 0;
    std::size_t near_count = 0;  // fluid nodes [0, near_count) lie inside B(0, R_trunc)
    std::string far_field = "inverse-radius map, exact for Laurent terms |x|^-4 and faster";
};

// Unit-sphere directions: Gauss-Legendre in cos(theta) x trapezoid in phi.
// Integrates spherical harmonics of degree < min(2 n_theta, n_phi) exactly.
inline SurfaceRule sphere_directions(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("quadrature: orders must be >= 1");
    SurfaceRule s;
    Rule1D g = gauss_legendre(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        double ct = g.x[i], st = std::sqrt(std::max(0.0, 1 - ct * ct));
        for (int j = 0; j < n_phi; ++j) {
            double ph = 2 * std::numbers::pi * (j + 0.5) / n_phi;
            Vec3d d(st * std::cos(ph), st * std::sin(ph), ct);
            s.x.push_back(d);
            s.n.push_back(d);
            s.w.push_back(g.w[i] * 2 * std::numbers::pi / n_phi);
        }
    }
    return s;
}

// Per-triangle rules of degree 1, 2 or 5.
inline SurfaceRule mesh_surface(const TriMesh& m, int order) {
    struct P {
        double a, b, c, w;
    };
    std::vector<P> pts;
    if (order <= 1) {
        pts = {{1. / 3, 1. / 3, 1. / 3, 1.0}};
    } else if (order == 2) {
        pts = {{2. / 3, 1. / 6, 1. / 6, 1. / 3}, {1. / 6, 2. / 3, 1. / 6, 1. / 3}, {1. / 6, 1. / 6, 2. / 3, 1. / 3}};
    } else {
        const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
        const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
        pts = {{1. / 3, 1. / 3, 1. / 3, 0.225},
               {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
               {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2}};
    }
    SurfaceRule s;
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        Vec3d A = m.corner(f, 0), B = m.corner(f, 1), C = m.corner(f, 2);
        double area = m.face_area(f);
        Vec3d n = m.face_normal(f);
        for (const auto& p : pts) {
            s.x.push_back(p.a * A + p.b * B + p.c * C);
            s.w.push_back(p.w * area);
            s.n.push_back(n);
        }
    }
    return s;
}

// Distance from the origin to the surface along each direction; the body
// must be star-shaped with respect to the origin.
inline std::vector<double> boundary_radii(const RigidBodySpec& spec, const std::vector<Vec3d>& dirs) {
    std::vector<double> rb(dirs.size(), spec.radius);
    if (spec.is_sphere()) return rb;
    Bvh bvh(*spec.mesh);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        auto ts = bvh.ray_hits(Vec3d::Zero(), dirs[i]);
        std::vector<double> u;
        for (double t : ts)
            if (u.empty() || t - u.back() > 1e-9 * (1 + t)) u.push_back(t);
        if (u.size() != 1) throw std::invalid_argument("quadrature: mesh is not star-shaped about its centre of mass");
        rb[i] = u[0];
    }
    return rb;
}

// Composite Gauss-Legendre on [r0, r1], sub-intervals growing geometrically
// by at most `ratio`, so nodes cluster near the body.
inline Rule1D graded_radial(double r0, double r1, int order, double ratio = 1.5) {
    int K = std::max(1, static_cast<int>(std::ceil(std::log(r1 / r0) / std::log(ratio) - 1e-12)));
    Rule1D out;
    double q = std::pow(r1 / r0, 1.0 / K);
    for (int k = 0; k < K; ++k) {
        double a = r0 * std::pow(q, k), b = (k == K - 1) ? r1 : r0 * std::pow(q, k + 1);
        Rule1D g = gauss_legendre(order, a, b);
        out.x.insert(out.x.end(), g.x.begin(), g.x.end());
        out.w.insert(out.w.end(), g.w.begin(), g.w.end());
    }
    return out;
}

struct QuadratureOptions {
    int far_order = 0;        // 0: same as radial_order
    double grading = 1.5;     // max ratio between successive radial sub-interval edges
    double start_radius = 0;  // > 0: fluid nodes only from this radius (sphere only)
};

inline QuadratureRule make_quadrature(const RigidBodySpec& spec, int surface_order, int radial_order,
                                      double truncation_radius, QuadratureOptions opt = {}) {
    if (surface_order < 1 || radial_order < 1) throw std::invalid_argument("quadrature: orders must be >= 1");
    spec.validate();
    if (!(truncation_radius > spec.diameter()))
        throw std::invalid_argument("quadrature: truncation radius must exceed the body diameter");
    QuadratureRule q;
    q.truncation_radius = truncation_radius;
    SurfaceRule dirs = sphere_directions(surface_order, 2 * surface_order);
    if (spec.is_sphere()) {
        q.surface = dirs;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            q.surface.x[i] = spec.radius * dirs.x[i];
            q.surface.w[i] = spec.radius * spec.radius * dirs.w[i];
        }
    } else {
        q.surface = mesh_surface(*spec.mesh, surface_order >= 3 ? 5 : surface_order);
    }
    std::vector<double> rb = boundary_radii(spec, dirs.x);
    if (opt.start_radius > 0) std::fill(rb.begin(), rb.end(), opt.start_radius);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        Rule1D rr = graded_radial(rb[i], truncation_radius, radial_order, opt.grading);
        for (std::size_t k = 0; k < rr.x.size(); ++k) {
            q.fluid.x.push_back(rr.x[k] * dirs.x[i]);
            q.fluid.w.push_back(dirs.w[i] * rr.w[k] * rr.x[k] * rr.x[k]);
        }
    }
    q.near_count = q.fluid.size();
    // far field: r = R/s, r^2 dr = R^3 s^-4 ds
    Rule1D gs = gauss_legendre(opt.far_order > 0 ? opt.far_order : radial_order, 0.0, 1.0);
    const double R = truncation_radius;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        for (std::size_t k = 0; k < gs.x.size(); ++k) {
            double s = gs.x[k];
            q.fluid.x.push_back((R / s) * dirs.x[i]);
            q.fluid.w.push_back(dirs.w[i] * gs.w[k] * R * R * R / std::pow(s, 4));
        }
    }
    return q;
}

// Nodes inside the body, for moment checks.
inline VolumeRule make_body_quadrature(const RigidBodySpec& spec, int angular_order, int radial_order) {
    SurfaceRule dirs = sphere_directions(angular_order, 2 * angular_order);
    VolumeRule v;
    std::vector<double> rb = boundary_radii(spec, dirs.x);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        std::vector<double> edges{0.0};
        if (spec.is_sphere())
            edges.insert(edges.end(), spec.shell_outer.begin(), spec.shell_outer.end());
        else
            edges.push_back(rb[i]);
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            Rule1D g = gauss_legendre(radial_order, edges[e], edges[e + 1]);
            for (std::size_t k = 0; k < g.x.size(); ++k) {
                v.x.push_back(g.x[k] * dirs.x[i]);
                v.w.push_back(dirs.w[i] * g.w[k] * g.x[k] * g.x[k]);
            }
        }
    }
    return v;
}

// density at a body point, for quadrature of the moments
// density at a body point, for quadrature of the moments
inline double density_at(const RigidBodySpec& spec, const Vec3d& x) {
    if (spec.is_sphere()) {
        double r = x.norm();
        for (std::size_t k = 0; k < spec.shell_outer.size(); ++k)
            if (r <= spec.shell_outer[k] * (1 + 1e-14)) return spec.inertia_scale * spec.shell_density[k];
        return 0.0;
    }
    if (spec.face_density.size() != 1)
        throw std::invalid_argument("inertia quadrature: per-face mesh densities use the closed-form path");
    return spec.rho_face(0);
}

inline Inertia inertia_by_quadrature(const RigidBodySpec& spec, int angular_order = 16, int radial_order = 12) {
    VolumeRule v = make_body_quadrature(spec, angular_order, radial_order);
    Inertia out;
    Vec3d first = Vec3d::Zero();
    Mat3 second = Mat3::Zero();
    for (std::size_t i = 0; i < v.size(); ++i) {
        double rho = density_at(spec, v.x[i]);
        out.m += rho * v.w[i];
        first += rho * v.w[i] * v.x[i];
        second += rho * v.w[i] * v.x[i] * v.x[i].transpose();
    }
    out.h0 = first / out.m;
    Mat3 c = second - out.m * out.h0 * out.h0.transpose();
    out.J = c.trace() * Mat3::Identity() - c;
    return out;
}

}  // namespace rigidflow::geometry
