#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rigidflow/euler/solver.hpp"
#include "rigidflow/studies/inviscid.hpp"

namespace rigidflow::studies {

enum class InertiaSystem { Viscous, Euler };

struct InertiaPoint {
    double sigma = 0;
    double body_h1 = 0;         // viscous: ||(l,r)||_{H1(0,T)}
    double body_sup = 0;        // sup |(l,r)|
    double rate_sup = 0;        // sup |(l,r)'|
    double fluid_distance = 0;  // ||u - u_fixed||_{L2(0,T; L2(F ∩ B(0, R_loc)))}
    double min_slack = 0;       // viscous ledger, relative
    double resampling_gap = 0;
};

struct InertiaConfig {
    static euler::RingSpec coarse_ring() {
        euler::RingSpec r;
        r.spacing = 0.15;
        return r;
    }
    static euler::EulerParams euler_defaults() {
        euler::EulerParams p;
        p.T = 0.25;
        p.dt = 0.025;
        return p;
    }

    std::vector<double> sigma_grid{1, 10, 100, 1000};
    // viscous runs
    double T = 1.0, dt = 1e-2, nu = 1e-2, alpha = 1.0;
    std::uint64_t seed = 7;
    double amplitude = 0.3;  // exterior coefficients uniform in [-a, a]
    viscous::ViscousSetupOptions setup;
    double slack_tolerance = 1e-8;
    // Euler runs (T and dt come from `euler`); a coarser ring than the
    // conservation run, sampled twice as often
    euler::RingSpec ring = coarse_ring();
    euler::EulerParams euler = euler_defaults();
    int image_degree = 20;
    double local_radius = 0;  // 0: 2 R0 with the body inside B(0, R0/2)
    std::function<void(const InertiaPoint&)> on_point;
};

struct InertiaReport {
    InertiaSystem which = InertiaSystem::Viscous;
    std::vector<InertiaPoint> points;
    double local_radius = 0;
    double reference_min_slack = 0;  // fixed-body run, relative (viscous)
    bool body_decreasing = false;    // within 2% between grid points
    bool body_strict = false;
    bool fluid_decreasing = false;
    SlopeFit body_slope, fluid_slope;  // against sigma, reported only
    double resampling_gap = 0;
};

namespace detail {

inline double local_radius(const geometry::RigidBodySpec& spec, double given) {
    return given > 0 ? given : 4.0 * spec.bounding_radius();
}

inline void finish_inertia(InertiaReport& r) {
    std::vector<double> s, body, rate, fluid;
    for (const auto& p : r.points) {
        s.push_back(p.sigma);
        body.push_back(r.which == InertiaSystem::Viscous ? p.body_h1 : p.body_sup);
        rate.push_back(p.rate_sup);
        fluid.push_back(p.fluid_distance);
        r.resampling_gap = std::max(r.resampling_gap, p.resampling_gap);
    }
    r.body_decreasing = decreasing_within(body, 0.02) && decreasing_within(rate, 0.02);
    r.body_strict = strictly_decreasing(body) && strictly_decreasing(rate);
    r.fluid_decreasing = strictly_decreasing(fluid);
    r.body_slope = fit_loglog(s, body, false);
    r.fluid_slope = fit_loglog(s, fluid, false);
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = i;
    return k;
}

}  // namespace detail

// Exterior coefficients drawn from the seed, rigid part zero.
inline VectorXd random_fluid_state(int N, std::uint64_t seed, double amplitude) {
    Rng rng(seed);
    VectorXd G = VectorXd::Zero(N);
    for (int j = 6; j < N; ++j) G[j] = rng.uniform(-amplitude, amplitude);
    return G;
}

inline InertiaReport infinite_inertia_viscous(const geometry::RigidBodySpec& body, const InertiaConfig& c) {
    viscous::ViscousSetup base = viscous::make_viscous_setup(body, c.setup);
    const int N = base.system.N;
    VectorXd G0 = random_fluid_state(N, c.seed, c.amplitude);

    InertiaReport rep;
    rep.which = InertiaSystem::Viscous;
    rep.local_radius = detail::local_radius(base.k.spec, c.local_radius);
    // fixed obstacle: exterior modes only, u_S = 0 on the boundary
    viscous::GalerkinSystem fixed = base.system.restricted(6);
    ViscousRun ref = run_viscous({base.k, base.ctx, base.basis, fixed}, G0.tail(N - 6), c.nu, c.alpha, c.T, c.dt,
                                 c.slack_tolerance);
    rep.reference_min_slack = ref.traj.min_slack() / ref.traj.norm0_sq;

    const auto& Q = base.ctx.quad.fluid;
    std::vector<std::size_t> local;
    for (std::size_t q = 0; q < Q.size(); ++q)
        if (Q.x[q].norm() <= rep.local_radius) local.push_back(q);

    for (double sigma : c.sigma_grid) {
        viscous::ViscousSetup S = viscous::scale_inertia(base, sigma);
        ViscousRun run = run_viscous(S, G0, c.nu, c.alpha, c.T, c.dt, c.slack_tolerance);
        auto idx = align_times(run.traj.t, ref.traj.t);
        const std::size_t n = idx.size();
        std::vector<double> t(n), dist2(n);
        std::vector<Vec6> b(n);
        for (std::size_t k = 0; k < n; ++k) {
            t[k] = ref.traj.t[k];
            const VectorXd& G = run.traj.G[idx[k]];
            b[k] = G.head<6>();
            forms::Sampled u = viscous::reconstruct(S.system, G);
            forms::Sampled f = viscous::reconstruct(fixed, ref.traj.G[k]);
            double d = 0;
            for (std::size_t q : local) d += Q.w[q] * (u.vol[q].u - f.vol[q].u).squaredNorm();
            dist2[k] = d;
        }
        auto db = fd_derivative(t, b);
        InertiaPoint p;
        p.sigma = sigma;
        auto norms = [&](const std::vector<std::size_t>& keep, double& h1, double& dist, double& bs, double& rs) {
            std::vector<double> tk, f, g, d;
            bs = rs = 0;
            for (std::size_t k : keep) {
                tk.push_back(t[k]);
                f.push_back(b[k].squaredNorm());
                g.push_back(db[k].squaredNorm());
                d.push_back(dist2[k]);
                bs = std::max(bs, b[k].norm());
                rs = std::max(rs, db[k].norm());
            }
            h1 = std::sqrt(trapezoid(tk, f) + trapezoid(tk, g));
            dist = std::sqrt(trapezoid(tk, d));
        };
        norms(detail::all_indices(n), p.body_h1, p.fluid_distance, p.body_sup, p.rate_sup);
        double h1h, dh, bsh, rsh;
        norms(halved_indices(n), h1h, dh, bsh, rsh);
        p.resampling_gap = std::max(relative_gap(p.body_h1, h1h), relative_gap(p.fluid_distance, dh));
        p.min_slack = run.traj.min_slack() / run.traj.norm0_sq;
        rep.points.push_back(p);
        if (c.on_point) c.on_point(p);
    }
    detail::finish_inertia(rep);
    return rep;
}

inline euler::EulerGeometry scale_inertia(const euler::EulerGeometry& base, double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("scale_inertia: sigma must be > 0");
    euler::EulerGeometry g = base;
    g.k.spec.inertia_scale *= sigma;
    g.k.inertia.m *= sigma;
    g.k.inertia.J *= sigma;
    g.k.M1 *= sigma;
    g.k.M = g.k.M1 + g.k.M2;
    g.ctx.m *= sigma;
    g.ctx.J *= sigma;
    return g;
}

inline InertiaReport infinite_inertia_euler(const geometry::RigidBodySpec& body, const InertiaConfig& c) {
    viscous::ViscousSetupOptions so = c.setup;
    auto k = kirchhoff::make_kirchhoff(body);
    forms::FormsContext ctx;
    ctx.quad = geometry::make_quadrature(k.spec, 8, 8, 4.0);
    ctx.m = k.inertia.m;
    ctx.J = k.inertia.J;
    ctx.chi = geometry::CutoffField(k.spec, so.cutoff_width);
    euler::EulerGeometry base = euler::make_euler_geometry(k, ctx, c.image_degree);

    InertiaReport rep;
    rep.which = InertiaSystem::Euler;
    rep.local_radius = detail::local_radius(k.spec, c.local_radius);
    euler::EulerParams p = c.euler;
    p.keep_snapshots = true;
    p.energy_every = 1 << 30;
    euler::EulerState s0;
    s0.field = euler::seed_ring(c.ring);

    euler::EulerParams pf = p;
    pf.frozen_body = true;
    euler::EulerTrajectory ref = euler::run_euler(base, s0, pf);
    const std::size_t n = ref.rows.size();
    // one local rule per sample, shared by every sigma
    std::vector<geometry::VolumeRule> rules(n);
    for (std::size_t k2 = 0; k2 < n; ++k2) {
        geometry::VolumeRule r = euler::adapted_fluid_rule(base.radius, ref.snapshots[k2], p.forcing_rule);
        for (std::size_t q = 0; q < r.size(); ++q)
            if (r.x[q].norm() <= rep.local_radius) {
                rules[k2].x.push_back(r.x[q]);
                rules[k2].w.push_back(r.w[q]);
            }
    }
    std::vector<double> t(n);
    for (std::size_t k2 = 0; k2 < n; ++k2) t[k2] = ref.rows[k2].t;

    for (double sigma : c.sigma_grid) {
        euler::EulerGeometry g = scale_inertia(base, sigma);
        euler::EulerTrajectory tr = euler::run_euler(g, s0, p);
        if (tr.rows.size() != n) throw std::invalid_argument("misaligned sampling between the Euler runs");
        std::vector<double> dist2(n);
        for (std::size_t k2 = 0; k2 < n; ++k2) {
            const auto& row = tr.rows[k2];
            if (std::abs(row.t - t[k2]) > 1e-9) throw std::invalid_argument("misaligned sampling between the Euler runs");
            euler::Reconstruction a(g, tr.snapshots[k2], row.ell, row.rot);
            euler::Reconstruction f(base, ref.snapshots[k2], Vec3d::Zero(), Vec3d::Zero());
            const auto& R = rules[k2];
            dist2[k2] = chunked_sum<double>(R.size(), [&](std::size_t q) {
                return R.w[q] * (a.velocity(R.x[q]) - f.velocity(R.x[q])).squaredNorm();
            }, 0.0);
        }
        InertiaPoint pt;
        pt.sigma = sigma;
        auto norms = [&](const std::vector<std::size_t>& keep, double& bs, double& rs, double& dist) {
            std::vector<double> tk, d;
            bs = rs = 0;
            for (std::size_t k2 : keep) {
                const auto& row = tr.rows[k2];
                Vec6 lr;
                lr << row.ell, row.rot;
                bs = std::max(bs, lr.norm());
                rs = std::max(rs, row.rate.norm());
                tk.push_back(t[k2]);
                d.push_back(dist2[k2]);
            }
            dist = std::sqrt(trapezoid(tk, d));
        };
        norms(detail::all_indices(n), pt.body_sup, pt.rate_sup, pt.fluid_distance);
        double bh, rh, dh;
        norms(halved_indices(n), bh, rh, dh);
        pt.resampling_gap = std::max({relative_gap(pt.body_sup, bh), relative_gap(pt.rate_sup, rh),
                                      relative_gap(pt.fluid_distance, dh)});
        rep.points.push_back(pt);
        if (c.on_point) c.on_point(pt);
    }
    detail::finish_inertia(rep);
    return rep;
}

inline InertiaReport infinite_inertia_study(const geometry::RigidBodySpec& body, const InertiaConfig& c,
                                            InertiaSystem which) {
    if (c.sigma_grid.empty()) throw std::invalid_argument("inertia study: empty sigma grid");
    for (std::size_t i = 1; i < c.sigma_grid.size(); ++i)
        if (!(c.sigma_grid[i] > c.sigma_grid[i - 1])) throw std::invalid_argument("inertia study: sigma grid must increase");
    return which == InertiaSystem::Viscous ? infinite_inertia_viscous(body, c) : infinite_inertia_euler(body, c);
}

}  // namespace rigidflow::studies
