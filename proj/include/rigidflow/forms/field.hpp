#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "rigidflow/core/jet.hpp"
#include "rigidflow/core/parallel.hpp"
#include "rigidflow/geometry/quadrature.hpp"

namespace rigidflow::forms {

using geometry::QuadratureRule;

struct Sample {
    Vec3d u = Vec3d::Zero();
    Mat3 grad = Mat3::Zero();  // grad(i,j) = d u_i / d x_j
};

// A field of H: fluid part on F0 (value and gradient) and rigid part
// ell + r ^ x in the body. The flags record what constructors can certify.
struct FieldH {
    std::function<Sample(const Vec3d&)> fluid;
    std::function<Vec3d(const Vec3d&)> laplacian;  // optional, for the integration-by-parts check
    Vec3d ell = Vec3d::Zero();
    Vec3d rot = Vec3d::Zero();
    bool in_V = false;           // weighted gradient integrability certified
    bool matched_trace = false;  // u.n = (ell + r^x).n on the boundary
    double support = std::numeric_limits<double>::infinity();  // fluid part zero beyond |x| = support
    std::string label;

    Sample at(const Vec3d& x) const { return fluid ? fluid(x) : Sample{}; }
    Vec3d rigid(const Vec3d& x) const { return ell + rot.cross(x); }
};

// Wrap a templated functor f(Vec3<S>) -> Vec3<S>; jets give the gradient
// and, for the Laplacian, the Hessian.
template <class F>
FieldH field_from_functor(F f, Vec3d ell, Vec3d rot, std::string label = {}) {
    FieldH h;
    h.fluid = [f](const Vec3d& x) {
        auto j = eval_grad(f, x);
        return Sample{j.u, j.grad};
    };
    h.laplacian = [f](const Vec3d& x) { return eval_hess(f, x).laplacian(); };
    h.ell = ell;
    h.rot = rot;
    h.label = std::move(label);
    return h;
}

inline FieldH scaled(const FieldH& a, double s) {
    FieldH h = a;
    if (a.fluid) h.fluid = [f = a.fluid, s](const Vec3d& x) {
        Sample p = f(x);
        p.u *= s;
        p.grad *= s;
        return p;
    };
    if (a.laplacian) h.laplacian = [l = a.laplacian, s](const Vec3d& x) { return Vec3d(s * l(x)); };
    h.ell = s * a.ell;
    h.rot = s * a.rot;
    return h;
}

inline FieldH combine(const std::vector<FieldH>& fs, const std::vector<double>& c) {
    FieldH h;
    h.in_V = h.matched_trace = true;
    h.support = 0;
    bool lap = true;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        h.ell += c[i] * fs[i].ell;
        h.rot += c[i] * fs[i].rot;
        h.in_V = h.in_V && fs[i].in_V;
        h.matched_trace = h.matched_trace && fs[i].matched_trace;
        if (c[i] != 0.0) h.support = std::max(h.support, fs[i].support);
        lap = lap && static_cast<bool>(fs[i].laplacian);
    }
    h.fluid = [fs, c](const Vec3d& x) {
        Sample s;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (c[i] == 0.0 || !fs[i].fluid) continue;
            Sample p = fs[i].fluid(x);
            s.u += c[i] * p.u;
            s.grad += c[i] * p.grad;
        }
        return s;
    };
    if (lap)
        h.laplacian = [fs, c](const Vec3d& x) {
            Vec3d v = Vec3d::Zero();
            for (std::size_t i = 0; i < fs.size(); ++i)
                if (c[i] != 0.0) v += c[i] * fs[i].laplacian(x);
            return v;
        };
    h.label = "combination";
    return h;
}

inline FieldH sum(const FieldH& a, const FieldH& b) { return combine({a, b}, {1.0, 1.0}); }
inline FieldH difference(const FieldH& a, const FieldH& b) { return combine({a, b}, {1.0, -1.0}); }

// Field values on the fluid and surface nodes of a rule.
struct Sampled {
    std::vector<Sample> vol, surf;
    Vec3d ell = Vec3d::Zero(), rot = Vec3d::Zero();
};

inline Sampled sample(const FieldH& f, const QuadratureRule& q) {
    Sampled s;
    s.ell = f.ell;
    s.rot = f.rot;
    s.vol.resize(q.fluid.size());
    s.surf.resize(q.surface.size());
    parallel_for(q.fluid.size(), [&](std::size_t i) {
        if (q.fluid.x[i].norm() <= f.support) s.vol[i] = f.at(q.fluid.x[i]);
    });
    parallel_for(q.surface.size(), [&](std::size_t i) { s.surf[i] = f.at(q.surface.x[i]); });
    return s;
}

}  // namespace rigidflow::forms
