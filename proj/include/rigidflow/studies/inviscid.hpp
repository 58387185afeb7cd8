#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rigidflow/euler/solver.hpp"
#include "rigidflow/studies/common.hpp"
#include "rigidflow/viscous/setup.hpp"

namespace rigidflow::studies {

using Eigen::VectorXd;
using kirchhoff::Vec6;

struct ViscousRun {
    double nu = 0, alpha = 0;
    viscous::ViscousTrajectory traj;
};

// One grid point. Norms of w = u - u^E over the shared time samples.
struct RatePoint {
    double nu = 0, alpha = 0;
    double w_linf_h = 0;     // max_t ||w||_H
    double w_h1 = 0;         // nu^1/2 ||w||_{L2 H1(F)}
    double w_slip = 0;       // (alpha nu)^1/2 ||w - w_S||_{L2(dS)}
    double body_h1 = 0;      // ||(l,r) - (l^E,r^E)||_{H1(0,T)}, FD derivative
    double body_h1_am = 0;   // same with the added-mass derivatives
    double u_h1 = 0;         // nu^1/2 ||u||_{L2 H1(F)}
    double u_slip = 0;       // (alpha nu)^1/2 ||u - u_S||_{L2(dS)}
    double w0_h = 0;         // ||w(0)||_H
    double derivative_gap = 0;  // max |FD - AM| / max |AM|
    double resampling_gap = 0;  // worst relative change at half the time samples
    double min_slack = 0;    // ledger slack relative to ||u0||_H^2
    int halvings = 0;
};

struct RateReport {
    std::string label;
    std::vector<RatePoint> points;  // nu decreasing
    SlopeFit slope_h, slope_h1, slope_body;
    double constant = 0;    // K with ||w||_{L inf H} ~ K nu^3/4
    double constant_C = 0;  // K / (1 + alpha)
    bool monotone_h = false, monotone_body = false;
    double resampling_gap = 0;

    std::vector<double> grid() const {
        std::vector<double> v;
        for (const auto& p : points) v.push_back(p.nu);
        return v;
    }
    template <class F>
    std::vector<double> column(F f) const {
        std::vector<double> v;
        for (const auto& p : points) v.push_back(f(p));
        return v;
    }
};

struct InviscidLimitConfig {
    std::vector<double> nu_grid{4e-2, 2e-2, 1e-2, 5e-3};
    std::vector<double> alpha_grid{0.5, 1.0, 2.0};  // fixed-alpha families
    double main_alpha = 1.0;
    bool friction_family = true;  // extra family alpha = nu^friction_power
    double friction_power = -0.5;
    double T = 1.0, dt = 1e-2;
    Vec3d ell0{0.0, 0.0, 1.0}, rot0{0.5, 0.0, 0.0};
    viscous::ViscousSetupOptions setup;
    int image_degree = 20;
    double slack_tolerance = 1e-8;
    // called as each grid point finishes (family label, point)
    std::function<void(const std::string&, const RatePoint&)> on_point;
};

// Euler reference along the viscous time grid: the state at each sample
// plus the fields needed to rebuild u^E.
struct EulerReference {
    euler::EulerTrajectory traj;
    std::vector<double> t;
};

struct InviscidLimitReport {
    std::vector<RateReport> families;  // fixed alpha, then the friction family
    std::size_t main_family = 0;
    std::vector<double> alpha_grid, constants;  // pinned-slope K per fixed alpha
    bool constants_increasing = false;
    double euler_energy_drift = 0;
    double euler_bc_residual = 0;
};

class StudyFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct SampleNorms {
    double w_h2 = 0, w_h1sq = 0, w_slip2 = 0, u_h1sq = 0, u_slip2 = 0;
};

// squared norms at one time; u^E rebuilt from the Euler state
inline SampleNorms sample_norms(const viscous::ViscousSetup& S, const euler::EulerGeometry& g,
                                const euler::VortexField& field, const Vec3d& ellE, const Vec3d& rotE,
                                const VectorXd& G) {
    forms::Sampled u = viscous::reconstruct(S.system, G);
    euler::Reconstruction rec(g, field, ellE, rotE);
    const auto& Q = S.ctx.quad;
    const Vec3d dl = u.ell - ellE, dr = u.rot - rotE;
    struct Acc {
        double h = 0, h1 = 0, u1 = 0;
        Acc operator+(const Acc& o) const { return {h + o.h, h1 + o.h1, u1 + o.u1}; }
    };
    Acc vol = chunked_sum<Acc>(Q.fluid.size(), [&](std::size_t q) {
        forms::Sample e = rec.velocity_grad(Q.fluid.x[q]);
        Vec3d du = u.vol[q].u - e.u;
        Mat3 dg = u.vol[q].grad - e.grad;
        double w = Q.fluid.w[q];
        return Acc{w * du.squaredNorm(), w * (du.squaredNorm() + dg.squaredNorm()),
                   w * (u.vol[q].u.squaredNorm() + u.vol[q].grad.squaredNorm())};
    }, Acc{});
    SampleNorms n;
    n.w_h2 = vol.h + S.ctx.m * dl.squaredNorm() + dr.dot(S.ctx.J * dr);
    n.w_h1sq = vol.h1;
    n.u_h1sq = vol.u1;
    for (std::size_t s = 0; s < Q.surface.size(); ++s) {
        const Vec3d& x = Q.surface.x[s];
        Vec3d uS = u.surf[s].u - (u.ell + u.rot.cross(x));
        Vec3d eS = rec.velocity(x) - (ellE + rotE.cross(x));
        n.w_slip2 += Q.surface.w[s] * (uS - eS).squaredNorm();
        n.u_slip2 += Q.surface.w[s] * uS.squaredNorm();
    }
    return n;
}

struct PointNorms {
    double w_linf_h, w_h1, w_slip, u_h1, u_slip, body_h1, body_h1_am;
};

inline PointNorms reduce(const std::vector<double>& t, const std::vector<SampleNorms>& s,
                         const std::vector<Vec6>& d, const std::vector<Vec6>& dd_fd, const std::vector<Vec6>& dd_am,
                         const std::vector<std::size_t>& keep, double nu, double alpha) {
    std::vector<double> tk, a, b, c, e, f, g, h;
    double linf = 0;
    for (std::size_t k : keep) {
        tk.push_back(t[k]);
        linf = std::max(linf, std::sqrt(std::max(0.0, s[k].w_h2)));
        a.push_back(s[k].w_h1sq);
        b.push_back(s[k].w_slip2);
        c.push_back(s[k].u_h1sq);
        e.push_back(s[k].u_slip2);
        f.push_back(d[k].squaredNorm());
        g.push_back(dd_fd[k].squaredNorm());
        h.push_back(dd_am[k].squaredNorm());
    }
    PointNorms p;
    p.w_linf_h = linf;
    p.w_h1 = std::sqrt(nu * trapezoid(tk, a));
    p.w_slip = std::sqrt(alpha * nu * trapezoid(tk, b));
    p.u_h1 = std::sqrt(nu * trapezoid(tk, c));
    p.u_slip = std::sqrt(alpha * nu * trapezoid(tk, e));
    p.body_h1 = std::sqrt(trapezoid(tk, f) + trapezoid(tk, g));
    p.body_h1_am = std::sqrt(trapezoid(tk, f) + trapezoid(tk, h));
    return p;
}

}  // namespace detail

inline EulerReference euler_reference(const euler::EulerGeometry& g, const Vec3d& ell0, const Vec3d& rot0, double T,
                                      double dt, euler::VortexField field = {}) {
    euler::EulerState s;
    s.field = std::move(field);
    s.ell = ell0;
    s.rot = rot0;
    euler::EulerParams p;
    p.T = T;
    p.dt = dt;
    p.energy_every = 1 << 30;  // first and last record only
    EulerReference r;
    r.traj = euler::run_euler(g, s, p);
    for (const auto& row : r.traj.rows) r.t.push_back(row.t);
    return r;
}

// All norms of one viscous run against the reference, on the reference
// samples and again on every other sample.
inline RatePoint compare_to_euler(const viscous::ViscousSetup& S, const euler::EulerGeometry& g,
                                  const EulerReference& E, const ViscousRun& run) {
    auto idx = align_times(run.traj.t, E.t);
    const std::size_t n = idx.size();
    if (E.traj.snapshots.size() != n) throw std::invalid_argument("euler reference: snapshots were not kept");
    forms::FormsContext ctx = S.ctx;
    ctx.nu = run.nu;
    ctx.alpha = run.alpha;
    auto v = S.rigid_samples();
    std::vector<detail::SampleNorms> sn(n);
    std::vector<Vec6> diff(n), am(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& row = E.traj.rows[k];
        const VectorXd& G = run.traj.G[idx[k]];
        sn[k] = detail::sample_norms(S, g, E.traj.snapshots[k], row.ell, row.rot, G);
        diff[k] = G.head<6>();
        diff[k].head<3>() -= row.ell;
        diff[k].tail<3>() -= row.rot;
        auto f = viscous::body_rate_from_added_mass(viscous::reconstruct(S.system, G), ctx, S.k, v);
        am[k] = f.rate - row.rate;
    }
    auto fd = fd_derivative(E.t, diff);
    RatePoint p;
    p.nu = run.nu;
    p.alpha = run.alpha;
    std::vector<std::size_t> all(n);
    for (std::size_t k = 0; k < n; ++k) all[k] = k;
    auto full = detail::reduce(E.t, sn, diff, fd, am, all, run.nu, run.alpha);
    auto half = detail::reduce(E.t, sn, diff, fd, am, halved_indices(n), run.nu, run.alpha);
    p.w_linf_h = full.w_linf_h;
    p.w_h1 = full.w_h1;
    p.w_slip = full.w_slip;
    p.u_h1 = full.u_h1;
    p.u_slip = full.u_slip;
    p.body_h1 = full.body_h1;
    p.body_h1_am = full.body_h1_am;
    p.w0_h = std::sqrt(std::max(0.0, sn[0].w_h2));
    for (auto [a, b] : {std::pair{full.w_linf_h, half.w_linf_h}, {full.w_h1, half.w_h1}, {full.w_slip, half.w_slip},
                        {full.body_h1, half.body_h1}})
        p.resampling_gap = std::max(p.resampling_gap, relative_gap(a, b));
    double gap = 0, scale = 0;
    for (std::size_t k = 0; k < n; ++k) {
        gap = std::max(gap, (fd[k] - am[k]).norm());
        scale = std::max(scale, am[k].norm());
    }
    p.derivative_gap = scale > 0 ? gap / scale : gap;
    p.min_slack = run.traj.norm0_sq > 0 ? run.traj.min_slack() / run.traj.norm0_sq : run.traj.min_slack();
    p.halvings = run.traj.halvings;
    return p;
}

inline ViscousRun run_viscous(const viscous::ViscousSetup& S, const VectorXd& G0, double nu, double alpha, double T,
                              double dt, double slack_tolerance) {
    viscous::ViscousParams vp;
    vp.nu = nu;
    vp.alpha = alpha;
    vp.T = T;
    vp.dt = dt;
    vp.slack_tolerance = slack_tolerance;
    ViscousRun r{nu, alpha, viscous::integrate(S.system, G0, vp)};
    if (r.traj.min_slack() < -slack_tolerance * r.traj.norm0_sq)
        throw StudyFailure("viscous run at nu = " + std::to_string(nu) + " (alpha = " + std::to_string(alpha) +
                           ") violates its energy ledger");
    return r;
}

inline void finish_report(RateReport& r) {
    auto nu = r.grid();
    auto wh = r.column([](const RatePoint& p) { return p.w_linf_h; });
    auto w1 = r.column([](const RatePoint& p) { return p.w_h1; });
    auto bh = r.column([](const RatePoint& p) { return p.body_h1; });
    r.slope_h = fit_loglog(nu, wh);
    r.slope_h1 = fit_loglog(nu, w1);
    r.slope_body = fit_loglog(nu, bh);
    r.constant = pinned_constant(nu, wh, 0.75);
    double alpha = r.points.empty() ? 0 : r.points.front().alpha;
    r.constant_C = r.constant / (1 + alpha);
    r.monotone_h = strictly_decreasing(wh);
    r.monotone_body = strictly_decreasing(bh);
    r.resampling_gap = 0;
    for (const auto& p : r.points) r.resampling_gap = std::max(r.resampling_gap, p.resampling_gap);
}

struct BodyH1Row {
    double nu = 0, alpha = 0;
    double h1_fd = 0, h1_am = 0;  // derivative by FD / by the added-mass equations
    double derivative_gap = 0;
};

struct BodyH1Report {
    std::vector<BodyH1Row> rows;
    bool decreasing = false;
    double max_derivative_gap = 0;
};

inline BodyH1Report body_h1_report(const RateReport& r) {
    BodyH1Report b;
    std::vector<double> h;
    for (const auto& p : r.points) {
        b.rows.push_back({p.nu, p.alpha, p.body_h1, p.body_h1_am, p.derivative_gap});
        h.push_back(p.body_h1);
        b.max_derivative_gap = std::max(b.max_derivative_gap, p.derivative_gap);
    }
    b.decreasing = strictly_decreasing(h);
    return b;
}

// Runs must share the reference sampling (misaligned samples throw).
inline BodyH1Report body_h1_convergence(const viscous::ViscousSetup& S, const euler::EulerGeometry& g,
                                        const EulerReference& E, const std::vector<ViscousRun>& runs) {
    RateReport r;
    for (const auto& run : runs) r.points.push_back(compare_to_euler(S, g, E, run));
    return body_h1_report(r);
}

// Matched potential data u0 = u0^E = l0.grad Phi with body velocity (l0, r0);
// one Euler reference shared by every viscous run.
inline InviscidLimitReport inviscid_limit_study(const geometry::RigidBodySpec& body, const InviscidLimitConfig& c) {
    if (c.nu_grid.empty()) throw std::invalid_argument("inviscid study: empty nu grid");
    for (std::size_t i = 1; i < c.alpha_grid.size(); ++i)
        if (!(c.alpha_grid[i] > c.alpha_grid[i - 1])) throw std::invalid_argument("inviscid study: alpha grid must increase");
    for (std::size_t i = 1; i < c.nu_grid.size(); ++i)
        if (!(c.nu_grid[i] < c.nu_grid[i - 1])) throw std::invalid_argument("inviscid study: nu grid must decrease");
    viscous::ViscousSetup S = viscous::make_viscous_setup(body, c.setup);
    euler::EulerGeometry g = euler::make_euler_geometry(S.k, S.ctx, c.image_degree);
    EulerReference E = euler_reference(g, c.ell0, c.rot0, c.T, c.dt);
    VectorXd G0 = viscous::potential_coefficients(S.system.N, c.ell0, c.rot0);

    InviscidLimitReport rep;
    rep.euler_energy_drift = E.traj.energy_drift();
    rep.euler_bc_residual = E.traj.max_bc_residual();
    auto family = [&](const std::string& label, auto alpha_of) {
        RateReport r;
        r.label = label;
        for (double nu : c.nu_grid) {
            ViscousRun run = run_viscous(S, G0, nu, alpha_of(nu), c.T, c.dt, c.slack_tolerance);
            r.points.push_back(compare_to_euler(S, g, E, run));
            if (c.on_point) c.on_point(label, r.points.back());
        }
        finish_report(r);
        return r;
    };
    rep.alpha_grid = c.alpha_grid;
    bool have_main = false;
    for (double a : c.alpha_grid) {
        if (a == c.main_alpha) {
            rep.main_family = rep.families.size();
            have_main = true;
        }
        rep.families.push_back(family("alpha=" + std::to_string(a), [a](double) { return a; }));
        rep.constants.push_back(rep.families.back().constant);
    }
    if (!have_main) {
        rep.main_family = rep.families.size();
        double a = c.main_alpha;
        rep.families.push_back(family("alpha=" + std::to_string(a), [a](double) { return a; }));
    }
    rep.constants_increasing = rep.constants.size() >= 2;
    for (std::size_t i = 1; i < rep.constants.size(); ++i)
        if (!(rep.constants[i] > rep.constants[i - 1])) rep.constants_increasing = false;
    if (c.friction_family) {
        double p = c.friction_power;
        rep.families.push_back(family("alpha=nu^" + std::to_string(p), [p](double nu) { return std::pow(nu, p); }));
    }
    return rep;
}

}  // namespace rigidflow::studies
