#pragma once

#include <cmath>
#include <stdexcept>

#include "rigidflow/forms/field.hpp"
#include "rigidflow/geometry/fields.hpp"

namespace rigidflow::forms {

struct FormsContext {
    QuadratureRule quad;
    double alpha = 1.0;
    double nu = 1e-2;
    double m = 1.0;
    Mat3 J = Mat3::Identity();
    geometry::CutoffField chi;
    geometry::TruncationField chiR;

    void validate() const {
        if (!(alpha >= 0)) throw std::invalid_argument("forms: alpha must be >= 0");
        if (!(nu > 0)) throw std::invalid_argument("forms: nu must be > 0");
    }
};

inline Mat3 sym(const Mat3& g) { return 0.5 * (g + g.transpose()); }

// (u,v)_H = int_F u.v + m l_u.l_v + J r_u.r_v
inline double inner_h(const FormsContext& c, const Sampled& u, const Sampled& v) {
    double s = chunked_sum<double>(u.vol.size(), [&](std::size_t i) { return c.quad.fluid.w[i] * u.vol[i].u.dot(v.vol[i].u); }, 0.0);
    return s + c.m * u.ell.dot(v.ell) + (c.J * u.rot).dot(v.rot);
}

// a(u,v) = -alpha \oint (u-u_S).(v-v_S) - int_F D(u):D(v)
inline double eval_a(const FormsContext& c, const Sampled& u, const Sampled& v) {
    const auto& S = c.quad.surface;
    double bdry = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        Vec3d du = u.surf[i].u - (u.ell + u.rot.cross(S.x[i]));
        Vec3d dv = v.surf[i].u - (v.ell + v.rot.cross(S.x[i]));
        bdry += S.w[i] * du.dot(dv);
    }
    double vol = chunked_sum<double>(u.vol.size(), [&](std::size_t i) {
        return c.quad.fluid.w[i] * sym(u.vol[i].grad).cwiseProduct(sym(v.vol[i].grad)).sum();
    }, 0.0);
    return -c.alpha * bdry - vol;
}

namespace detail {
// The mass term carries the sign of the body-frame Newton law
// m l' = m l ^ r + F, i.e. -m det(r_u, l_v, l_w); the rotational and fluid
// terms are as displayed in the weak formulation.
inline double b_impl(const FormsContext& c, const Sampled& u, const Sampled& v, const Sampled& w, bool truncated) {
    double rigid = -c.m * det3(u.rot, v.ell, w.ell) + det3(c.J * u.rot, v.rot, w.rot);
    const auto& X = c.quad.fluid.x;
    double vol = chunked_sum<double>(u.vol.size(), [&](std::size_t i) {
        Vec3d arm = truncated ? c.chiR(X[i]) : X[i];
        Vec3d rel = u.vol[i].u - (u.ell + u.rot.cross(arm));
        return c.quad.fluid.w[i] * ((w.vol[i].grad * rel).dot(v.vol[i].u) - det3(u.rot, v.vol[i].u, w.vol[i].u));
    }, 0.0);
    return rigid + vol;
}
}  // namespace detail

inline double eval_b(const FormsContext& c, const Sampled& u, const Sampled& v, const Sampled& w) {
    return detail::b_impl(c, u, v, w, false);
}
inline double eval_b_truncated(const FormsContext& c, const Sampled& u, const Sampled& v, const Sampled& w) {
    return detail::b_impl(c, u, v, w, true);
}

// Field-level entry points
inline double inner_h(const FormsContext& c, const FieldH& u, const FieldH& v) {
    return inner_h(c, sample(u, c.quad), sample(v, c.quad));
}
inline double eval_a(const FormsContext& c, const FieldH& u, const FieldH& v) {
    return eval_a(c, sample(u, c.quad), sample(v, c.quad));
}
inline double eval_b(const FormsContext& c, const FieldH& u, const FieldH& v, const FieldH& w) {
    if (!w.in_V) throw std::invalid_argument("eval_b: third argument not certified in V (use eval_b_truncated)");
    return eval_b(c, sample(u, c.quad), sample(v, c.quad), sample(w, c.quad));
}
inline double eval_b_truncated(const FormsContext& c, const FieldH& u, const FieldH& v, const FieldH& w) {
    return eval_b_truncated(c, sample(u, c.quad), sample(v, c.quad), sample(w, c.quad));
}

// ---------------------------------------------------------------------------
// Norms

inline double norm_h(const FormsContext& c, const Sampled& u) { return std::sqrt(std::max(0.0, inner_h(c, u, u))); }

inline double grad_l2(const FormsContext& c, const Sampled& u, bool weighted = false) {
    double s = 0;
    for (std::size_t i = 0; i < u.vol.size(); ++i) {
        double wgt = weighted ? 1.0 + c.quad.fluid.x[i].squaredNorm() : 1.0;
        s += c.quad.fluid.w[i] * wgt * u.vol[i].grad.squaredNorm();
    }
    return std::sqrt(s);
}
inline double norm_vbar(const FormsContext& c, const Sampled& u) { return norm_h(c, u) + grad_l2(c, u); }
inline double norm_v(const FormsContext& c, const Sampled& u) { return norm_h(c, u) + grad_l2(c, u, true); }

// V-hat adds a Lipschitz seminorm sampled over pairs of near-field nodes
inline double norm_vhat(const FormsContext& c, const Sampled& u, std::size_t stride = 97) {
    double lip = 0;
    std::size_t n = std::min(c.quad.near_count, u.vol.size());
    for (std::size_t i = 0; i < n; i += stride)
        for (std::size_t j = i + stride; j < n; j += stride) {
            double d = (c.quad.fluid.x[i] - c.quad.fluid.x[j]).norm();
            if (d > 0) lip = std::max(lip, (u.vol[i].u - u.vol[j].u).norm() / d);
        }
    return norm_v(c, u) + lip;
}

inline double l2_fluid(const FormsContext& c, const Sampled& u) {
    double s = 0;
    for (std::size_t i = 0; i < u.vol.size(); ++i) s += c.quad.fluid.w[i] * u.vol[i].u.squaredNorm();
    return std::sqrt(s);
}
inline double l4_fluid(const FormsContext& c, const Sampled& u) {
    double s = 0;
    for (std::size_t i = 0; i < u.vol.size(); ++i) s += c.quad.fluid.w[i] * std::pow(u.vol[i].u.squaredNorm(), 2);
    return std::pow(s, 0.25);
}
inline double strain_l2(const FormsContext& c, const Sampled& u) {
    double s = 0;
    for (std::size_t i = 0; i < u.vol.size(); ++i) s += c.quad.fluid.w[i] * sym(u.vol[i].grad).squaredNorm();
    return std::sqrt(s);
}
inline double slip_l2(const FormsContext& c, const Sampled& u) {
    double s = 0;
    const auto& S = c.quad.surface;
    for (std::size_t i = 0; i < S.size(); ++i)
        s += S.w[i] * (u.surf[i].u - (u.ell + u.rot.cross(S.x[i]))).squaredNorm();
    return std::sqrt(s);
}
inline double trace_l2(const FormsContext& c, const Sampled& u) {
    double s = 0;
    const auto& S = c.quad.surface;
    for (std::size_t i = 0; i < S.size(); ++i) s += S.w[i] * u.surf[i].u.squaredNorm();
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Lifting curl(chi psi) with psi = (l ^ x - r |x|^2)/2: equals l + r ^ x
// where chi = 1 and vanishes where chi = 0.

struct LiftingFunctor {
    geometry::CutoffField chi;
    Vec3d ell, rot;
    template <class S>
    Vec3<S> operator()(const Vec3<S>& x) const {
        S c = chi(x);
        // grad chi through a nested jet so S may itself be a jet
        using G = Jet<S, 3>;
        Vec3<G> X;
        for (int k = 0; k < 3; ++k) {
            X[k].v = x[k];
            X[k].d[k] = S(1.0);
        }
        G cg = chi(X);
        Vec3<S> gc{cg.d[0], cg.d[1], cg.d[2]};
        S r2 = norm2(x);
        Vec3<S> psi = (cross(ell, x) - lift<S>(rot) * r2) * 0.5;
        Vec3<S> curl_psi = lift<S>(ell) + cross(rot, x);
        return curl_psi * c + cross(gc, psi);
    }
};

inline FieldH solid_lifting(const Vec3d& ell, const Vec3d& rot, const geometry::CutoffField& chi) {
    FieldH h;
    if (chi.analytic()) {
        h = field_from_functor(LiftingFunctor{chi, ell, rot}, ell, rot, "lifting");
    } else {
        auto value = [chi, ell, rot](const Vec3d& x) -> Vec3d {
            Vec3d psi = 0.5 * (ell.cross(x) - rot * x.squaredNorm());
            return chi.value(x) * (ell + rot.cross(x)) + chi.gradient(x).cross(psi);
        };
        h.fluid = [value, chi](const Vec3d& x) {
            Sample s;
            s.u = value(x);
            double e = 1e-5 * std::max(1.0, chi.width());
            for (int k = 0; k < 3; ++k) {
                Vec3d d = Vec3d::Unit(k) * e;
                s.grad.col(k) = (value(x + d) - value(x - d)) / (2 * e);
            }
            return s;
        };
        h.ell = ell;
        h.rot = rot;
        h.label = "lifting";
    }
    h.in_V = true;  // compactly supported fluid part
    h.matched_trace = true;
    return h;
}

// ---------------------------------------------------------------------------
// Integration by parts for the Laplacian: with n the fluid-outward normal (= minus the body normal nb)
//   int_F Lap u . v = -2 int_F D(u):D(v) + 2 l_v . \oint D(u) n + 2 r_v . \oint x ^ D(u) n
//                     + 2 \oint ((D(u) n) ^ n) . ((v - v_S) ^ n)

struct IdentityResidual {
    double lhs = 0, rhs = 0, residual = 0, scale = 0;
};

inline IdentityResidual verify_useful_identity(const FormsContext& c, const FieldH& u, const FieldH& v) {
    if (!u.laplacian) throw std::invalid_argument("useful identity: u needs second derivatives");
    const auto& Q = c.quad;
    Sampled su = sample(u, Q), sv = sample(v, Q);
    IdentityResidual r;
    double vol = 0, dd = 0, mag = 0;
    for (std::size_t i = 0; i < Q.fluid.size(); ++i) {
        if (Q.fluid.x[i].norm() > u.support) continue;
        Vec3d lap = u.laplacian(Q.fluid.x[i]);
        vol += Q.fluid.w[i] * lap.dot(sv.vol[i].u);
        dd += Q.fluid.w[i] * sym(su.vol[i].grad).cwiseProduct(sym(sv.vol[i].grad)).sum();
        mag += Q.fluid.w[i] * lap.norm() * sv.vol[i].u.norm();
    }
    Vec3d force = Vec3d::Zero(), torque = Vec3d::Zero();
    double tang = 0;
    const auto& S = Q.surface;
    for (std::size_t i = 0; i < S.size(); ++i) {
        Vec3d n = -S.n[i];
        Vec3d Dn = sym(su.surf[i].grad) * n;
        force += S.w[i] * Dn;
        torque += S.w[i] * S.x[i].cross(Dn);
        Vec3d slip = sv.surf[i].u - (sv.ell + sv.rot.cross(S.x[i]));
        tang += S.w[i] * Dn.cross(n).dot(slip.cross(n));
    }
    r.lhs = vol;
    r.rhs = -2 * dd + 2 * sv.ell.dot(force) + 2 * sv.rot.dot(torque) + 2 * tang;
    r.residual = std::abs(r.lhs - r.rhs);
    r.scale = std::max({mag, 2 * std::abs(dd), std::abs(r.lhs), 1e-300});
    return r;
}

}  // namespace rigidflow::forms
