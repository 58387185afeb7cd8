#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rigidflow/forms/monitors.hpp"
#include "rigidflow/studies/common.hpp"
#include "rigidflow/viscous/setup.hpp"

namespace rigidflow::cli {

// Identity and inequality suite on random combinations of the Galerkin
// basis (divergence free, matched normal trace, compactly supported apart
// from v_1..v_6).
struct VerifyConfig {
    int pairs = 200;        // b, b_R and the added-mass identity
    int useful_pairs = 5;   // integration-by-parts residuals (second derivatives are slow)
    int monitor_samples = 200;
    int lifting_points = 200;
    std::uint64_t seed = 11;
    int refine = 4;         // extra orders for the refined rule
    viscous::ViscousSetupOptions setup;
};

struct Check {
    std::string name;
    double value = 0, tolerance = 0;
    bool pass = false;
};

struct MonitorSample {
    std::string name;
    int index = 0;
    double param = 0, lhs = 0, rhs = 0;
    bool holds = false;
};

struct VerifyReport {
    double quadrature_tolerance = 0;  // relative change under rule refinement
    double trace_constant = 0;
    std::vector<Check> identities;    // b, b_R, integration by parts, lifting, added mass
    std::vector<Check> monitors;      // interpolation, wedge
    std::vector<MonitorSample> samples;
    int violations = 0;

    bool identities_pass() const {
        return std::all_of(identities.begin(), identities.end(), [](const Check& c) { return c.pass; });
    }
    bool monitors_pass() const {
        return violations == 0 && std::all_of(monitors.begin(), monitors.end(), [](const Check& c) { return c.pass; });
    }
};

namespace detail {

inline Eigen::VectorXd random_coefficients(studies::Rng& rng, int N, bool exterior_only = false) {
    Eigen::VectorXd g(N);
    for (int i = 0; i < N; ++i) g[i] = (exterior_only && i < 6) ? 0.0 : rng.uniform(-1, 1);
    return g;
}

// random symmetric positive definite J with eigenvalues in [0.2, 5]
inline Mat3 random_inertia(studies::Rng& rng) {
    Eigen::Quaterniond q(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (q.norm() < 1e-3) q = Eigen::Quaterniond::Identity();
    Mat3 Rm = q.normalized().toRotationMatrix();
    Vec3d ev = rng.vec3(0.2, 5.0);
    return Rm * ev.asDiagonal() * Rm.transpose();
}

// magnitude of b(u,v,w) before cancellation: the same sum over absolute
// values. b(u,v,u) itself can be arbitrarily small for a random pair.
inline double b_magnitude(const forms::FormsContext& c, const forms::Sampled& u, const forms::Sampled& v,
                          const forms::Sampled& w, bool truncated) {
    double s = std::abs(c.m * u.rot.dot(v.ell.cross(w.ell))) + std::abs((c.J * u.rot).dot(v.rot.cross(w.rot)));
    const auto& Q = c.quad.fluid;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        Vec3d arm = truncated ? c.chiR(Q.x[i]) : Q.x[i];
        Vec3d rel = u.vol[i].u - (u.ell + u.rot.cross(arm));
        s += Q.w[i] * (std::abs((w.vol[i].grad * rel).dot(v.vol[i].u)) + std::abs(u.rot.dot(v.vol[i].u.cross(w.vol[i].u))));
    }
    return std::max(s, 1e-300);
}

}  // namespace detail

inline VerifyReport run_verify(const geometry::RigidBodySpec& body, const VerifyConfig& c) {
    viscous::ViscousSetup S = viscous::make_viscous_setup(body, c.setup);
    const int N = S.system.N;
    studies::Rng rng(c.seed);
    VerifyReport rep;

    // quadrature tolerance: relative change of (u,u)_H and a(u,u) on a
    // refined rule, floored at roundoff
    {
        forms::FormsContext fine = S.ctx;
        fine.quad = geometry::make_quadrature(S.k.spec, c.setup.surface_order + c.refine,
                                              c.setup.radial_order + c.refine, c.setup.truncation);
        double tol = 0;
        for (int p = 0; p < 3; ++p) {
            Eigen::VectorXd g = detail::random_coefficients(rng, N);
            std::vector<double> cv(g.data(), g.data() + N);
            forms::FieldH u = forms::combine(S.basis.modes, cv);
            forms::Sampled a = forms::sample(u, S.ctx.quad), b = forms::sample(u, fine.quad);
            tol = std::max(tol, studies::relative_gap(forms::inner_h(S.ctx, a, a), forms::inner_h(fine, b, b)));
            tol = std::max(tol, studies::relative_gap(forms::eval_a(S.ctx, a, a), forms::eval_a(fine, b, b)));
        }
        rep.quadrature_tolerance = std::max(tol, 1e-13);
    }

    double b_rel = 0, bR_rel = 0, am_rel = 0;
    for (int p = 0; p < c.pairs; ++p) {
        forms::Sampled u = viscous::reconstruct(S.system, detail::random_coefficients(rng, N));
        forms::Sampled v = viscous::reconstruct(S.system, detail::random_coefficients(rng, N));
        b_rel = std::max(b_rel, std::abs(forms::eval_b(S.ctx, u, v, v)) / detail::b_magnitude(S.ctx, u, v, v, false));
        bR_rel = std::max(bR_rel,
                          std::abs(forms::eval_b_truncated(S.ctx, u, v, v)) / detail::b_magnitude(S.ctx, u, v, v, true));
        kirchhoff::Vec6 lhs, lr;
        for (int i = 0; i < 6; ++i) lhs[i] = forms::inner_h(S.ctx, u, S.system.samples[i]);
        lr << u.ell, u.rot;
        kirchhoff::Vec6 rhs = S.k.M * lr;
        am_rel = std::max(am_rel, (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300));
    }
    rep.identities.push_back({"b(u,v,v) = 0", b_rel, 1e-10, b_rel <= 1e-10});
    rep.identities.push_back({"b_R(u,v,v) = 0", bR_rel, 1e-10, bR_rel <= 1e-10});
    rep.identities.push_back({"(u, v_i)_H = M [l; r]", am_rel, rep.quadrature_tolerance,
                              am_rel <= rep.quadrature_tolerance});

    double useful = 0;
    for (int p = 0; p < c.useful_pairs; ++p) {
        Eigen::VectorXd gu = detail::random_coefficients(rng, N), gv = detail::random_coefficients(rng, N);
        forms::FieldH u = forms::combine(S.basis.modes, {gu.data(), gu.data() + N});
        forms::FieldH v = forms::combine(S.basis.modes, {gv.data(), gv.data() + N});
        auto r = forms::verify_useful_identity(S.ctx, u, v);
        useful = std::max(useful, r.residual / r.scale);
    }
    rep.identities.push_back({"integration by parts (Lap u, v)", useful, 10 * rep.quadrature_tolerance,
                              useful <= 10 * rep.quadrature_tolerance});

    // the lifting equals l + r ^ x where chi = 1
    double lift = 0;
    const double cw = S.ctx.chi.width();
    for (int p = 0; p < c.lifting_points; ++p) {
        Vec3d ell = rng.vec3(-1, 1), rot = rng.vec3(-1, 1);
        forms::FieldH L = forms::solid_lifting(ell, rot, S.ctx.chi);
        Vec3d d = rng.vec3(-1, 1);
        if (d.norm() < 1e-3) d = Vec3d::UnitX();
        d.normalize();
        Vec3d x;
        int tries = 0;
        do {
            x = d * (S.k.spec.bounding_radius() + rng.uniform(0, cw));
        } while (S.ctx.chi.value(x) != 1.0 && ++tries < 20);
        if (S.ctx.chi.value(x) != 1.0) continue;
        Vec3d exact = ell + rot.cross(x);
        lift = std::max(lift, (L.at(x).u - exact).norm() / std::max(exact.norm(), 1e-300));
    }
    rep.identities.push_back({"lifting = l + r ^ x on the layer", lift, 1e-10, lift <= 1e-10});

    // monitors on compactly supported exterior combinations
    forms::MonitorReport traces;
    double interp = 0;
    for (int p = 0; p < c.monitor_samples; ++p) {
        forms::Sampled w = viscous::reconstruct(S.system, detail::random_coefficients(rng, N, true));
        auto row = forms::interpolation_row(S.ctx, w);
        interp = std::max(interp, row.lhs / row.rhs);
        rep.samples.push_back({row.name, p, 0, row.lhs, row.rhs, row.holds});
        rep.violations += !row.holds;
        if (p < 20) forms::trace_rows(S.ctx, w, {0.1, 1.0, 10.0}, traces);
    }
    rep.trace_constant = traces.trace_constant;
    double wedge = 0;
    for (int p = 0; p < c.monitor_samples; ++p) {
        Mat3 J = p == 0 ? S.ctx.J : detail::random_inertia(rng);
        Vec3d r = rng.vec3(-1, 1);
        auto row = forms::wedge_row(J, r);
        wedge = std::max(wedge, row.rhs > 0 ? row.lhs / row.rhs : 0.0);
        rep.samples.push_back({row.name, p, forms::wedge_constant(J), row.lhs, row.rhs, row.holds});
        rep.violations += !row.holds;
    }
    rep.monitors.push_back({"interpolation lhs/rhs", interp, 1.0, interp <= 1.0});
    rep.monitors.push_back({"wedge lhs/rhs", wedge, 1.0, wedge <= 1.0 + 1e-12});
    return rep;
}

}  // namespace rigidflow::cli
