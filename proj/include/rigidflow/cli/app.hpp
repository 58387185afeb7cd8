#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rigidflow/cli/config.hpp"
#include "rigidflow/cli/output.hpp"
#include "rigidflow/cli/verify.hpp"
#include "rigidflow/euler/solver.hpp"
#include "rigidflow/motion/motion.hpp"
#include "rigidflow/studies/inertia.hpp"
#include "rigidflow/studies/inviscid.hpp"
#include "rigidflow/viscous/setup.hpp"

namespace rigidflow::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverFailure = 3, kLedgerViolation = 4 };

inline geometry::RigidBodySpec make_body(const RunConfig& c) {
    geometry::RigidBodySpec s;
    if (c.shape == "sphere") {
        s = geometry::RigidBodySpec::sphere(c.radius, c.density);
    } else if (c.shape == "icosphere") {
        s = geometry::RigidBodySpec::from_mesh(geometry::icosphere(c.icosphere_level, c.radius, c.volume_matched), c.density);
    } else {
        s = geometry::RigidBodySpec::from_mesh(geometry::read_mesh(c.mesh_file), c.density);
    }
    s.inertia_scale = c.inertia_scale;
    return s;
}

inline viscous::ViscousSetupOptions setup_options(const RunConfig& c) {
    viscous::ViscousSetupOptions o;
    o.N = c.N;
    o.surface_order = c.surface_order;
    o.radial_order = c.radial_order;
    o.truncation = c.truncation;
    o.cutoff_width = c.cutoff_width;
    o.chi_R = c.chi_R;
    return o;
}

inline euler::RingSpec ring_spec(const RunConfig& c) {
    euler::RingSpec r;
    r.centre = c.ring_centre;
    r.axis = c.ring_axis;
    r.radius = c.ring_radius;
    r.core = c.ring_core;
    r.circulation = c.ring_circulation;
    r.spacing = c.ring_spacing;
    r.eps_factor = c.ring_eps_factor;
    return r;
}

inline Json vec_json(const Vec3d& v) { return Json::array({num(v[0]), num(v[1]), num(v[2])}); }

inline Json mat_json(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(num(m(i, j)));
        a.push_back(r);
    }
    return a;
}

inline void write_motion_csv(const fs::path& path, const motion::BodyMotion& m) {
    CsvWriter w(path, {"t", "l1", "l2", "l3", "r1", "r2", "r3", "h1", "h2", "h3", "Q11", "Q12", "Q13", "Q21", "Q22",
                       "Q23", "Q31", "Q32", "Q33"});
    for (std::size_t n = 0; n < m.size(); ++n) {
        std::vector<double> row{m.t[n]};
        for (int k = 0; k < 3; ++k) row.push_back(m.ell[n][k]);
        for (int k = 0; k < 3; ++k) row.push_back(m.rot[n][k]);
        for (int k = 0; k < 3; ++k) row.push_back(m.h[n][k]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) row.push_back(m.Q[n](i, j));
        w.row(row);
    }
}

inline Json motion_json(const motion::BodyMotion& m) {
    Json j;
    if (m.size() == 0) return j;
    j["h_final"] = vec_json(m.h.back());
    j["Q_final"] = mat_json(m.Q.back());
    j["orthogonality_defect"] = num(m.orthogonality_defect());
    return j;
}

// FD derivative of the Galerkin (l, r) against the added-mass right-hand
// side at about `samples` interior steps: max |FD - AM| / max |AM|
struct AddedMassCheck {
    double max_gap = 0, max_rate = 0, relative = 0;
    int samples = 0;
};

inline AddedMassCheck added_mass_check(const viscous::ViscousSetup& S, const viscous::ViscousTrajectory& tr, double nu,
                                       double alpha, int samples = 20) {
    AddedMassCheck c;
    if (tr.t.size() < 3) return c;
    forms::FormsContext ctx = S.ctx;
    ctx.nu = nu;
    ctx.alpha = alpha;
    auto v = S.rigid_samples();
    std::size_t stride = std::max<std::size_t>(1, (tr.t.size() - 2) / samples);
    for (std::size_t n = 1; n + 1 < tr.t.size(); n += stride) {
        Eigen::VectorXd fd = (tr.G[n + 1] - tr.G[n - 1]) / (tr.t[n + 1] - tr.t[n - 1]);
        auto f = viscous::body_rate_from_added_mass(viscous::reconstruct(S.system, tr.G[n]), ctx, S.k, v);
        c.max_gap = std::max(c.max_gap, (fd.head<6>() - f.rate).norm());
        c.max_rate = std::max(c.max_rate, f.rate.norm());
        ++c.samples;
    }
    c.relative = c.max_rate > 0 ? c.max_gap / c.max_rate : c.max_gap;
    return c;
}

// ---------------------------------------------------------------------------

inline int run_viscous_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
    if (c.shape != "sphere") throw ConfigError("field 'body.shape'", "the Galerkin basis needs shape = sphere");
    if (c.profile == "ring") throw ConfigError("field 'initial.profile'", "ring data needs solver.kind = euler");
    const bool fixed = c.solver == SolverKind::FixedBody;
    if (fixed && (c.ell0.norm() > 0 || c.rot0.norm() > 0))
        throw ConfigError("field 'initial.ell'", "a fixed body starts at rest (l0 = r0 = 0)");
    viscous::ViscousSetup S = viscous::make_viscous_setup(make_body(c), setup_options(c));
    const int N = S.system.N;
    Eigen::VectorXd G0 = viscous::potential_coefficients(N, c.ell0, c.rot0);
    if (c.profile == "random") G0.tail(N - 6) = studies::random_fluid_state(N, c.seed, c.amplitude).tail(N - 6);
    viscous::GalerkinSystem sys = fixed ? S.system.restricted(6) : S.system;
    Eigen::VectorXd g0 = fixed ? Eigen::VectorXd(G0.tail(N - 6)) : G0;

    viscous::ViscousParams p;
    p.nu = c.nu;
    p.alpha = c.alpha.at(c.nu);
    p.T = c.T;
    p.dt = c.dt;
    p.slack_tolerance = c.slack_tolerance;
    p.max_halvings = c.max_halvings;
    log << "viscous run: N = " << N << ", nu = " << p.nu << ", alpha = " << p.alpha << ", T = " << p.T << "\n";
    viscous::ViscousTrajectory tr = viscous::integrate(sys, g0, p);
    const double tol = p.slack_tolerance * tr.norm0_sq;
    const bool ledger_ok = tr.min_slack() >= -tol;

    {
        CsvWriter w(out / "ledger.csv", {"t", "dt", "energy", "strain_dissipation", "slip_dissipation", "slack"});
        for (const auto& r : tr.ledger) w.row({r.t, r.dt, r.energy, r.strain_diss, r.slip_diss, r.slack});
    }
    std::vector<Vec3d> ell, rot;
    for (const auto& G : tr.G) {
        ell.push_back(fixed ? Vec3d::Zero() : Vec3d(G.head<3>()));
        rot.push_back(fixed ? Vec3d::Zero() : Vec3d(G.segment<3>(3)));
    }
    motion::BodyMotion mo = motion::reconstruct_world_frame(tr.t, ell, rot);
    write_motion_csv(out / "motion.csv", mo);

    Checkpoint ck;
    ck.meta = {{"solver", to_string(c.solver)}, {"N", sys.N}, {"nu", p.nu}, {"alpha", p.alpha}, {"config", to_ini(c)}};
    CheckpointArray t{"t", {tr.t.size()}, tr.t}, G{"G", {tr.G.size(), static_cast<std::size_t>(sys.N)}, {}};
    for (const auto& g : tr.G) G.data.insert(G.data.end(), g.data(), g.data() + g.size());
    ck.arrays = {t, G};
    write_checkpoint(out / "trajectory.rgf", ck);

    Json s;
    s["command"] = "run";
    s["solver"] = to_string(c.solver);
    s["N"] = sys.N;
    s["nu"] = num(p.nu);
    s["alpha"] = num(p.alpha);
    s["steps"] = tr.t.size() - 1;
    s["halvings"] = tr.halvings;
    s["rejected_steps"] = tr.rejected;
    s["energy_initial"] = num(tr.ledger.front().energy);
    s["energy_final"] = num(tr.ledger.back().energy);
    s["min_slack_relative"] = num(tr.norm0_sq > 0 ? tr.min_slack() / tr.norm0_sq : 0.0);
    s["ledger_ok"] = ledger_ok;
    if (!fixed) {
        s["l_final"] = vec_json(tr.G.back().head<3>());
        s["r_final"] = vec_json(tr.G.back().segment<3>(3));
        auto am = added_mass_check(S, tr, p.nu, p.alpha);
        s["added_mass_check"] = {{"relative", num(am.relative)}, {"samples", am.samples}};
    }
    s["motion"] = motion_json(mo);
    s["antisymmetry_defect"] = num(S.system.antisymmetry_defect);
    write_json(out / "summary.json", s);
    if (!ledger_ok) {
        log << "energy ledger violated: min slack " << tr.min_slack() << " < " << -tol << "\n";
        return kLedgerViolation;
    }
    return kOk;
}

inline int run_euler_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
    if (c.profile == "random") throw ConfigError("field 'initial.profile'", "random data needs the Galerkin solver");
    auto k = kirchhoff::make_kirchhoff(make_body(c));
    forms::FormsContext ctx;
    ctx.quad = geometry::make_quadrature(k.spec, c.surface_order, c.radial_order, c.truncation);
    ctx.m = k.inertia.m;
    ctx.J = k.inertia.J;
    ctx.chi = geometry::CutoffField(k.spec, c.cutoff_width);
    euler::EulerGeometry g = euler::make_euler_geometry(k, ctx, c.image_degree);
    euler::EulerState s0;
    s0.ell = c.ell0;
    s0.rot = c.rot0;
    if (c.profile == "ring") s0.field = euler::seed_ring(ring_spec(c));
    euler::EulerParams p;
    p.T = c.T;
    p.dt = c.dt;
    p.keep_snapshots = false;
    log << "euler run: " << s0.field.size() << " particles, T = " << p.T << ", dt = " << p.dt << "\n";
    euler::EulerTrajectory tr = euler::run_euler(g, s0, p);

    {
        CsvWriter w(out / "euler.csv", {"t", "l1", "l2", "l3", "r1", "r2", "r3", "dl1", "dl2", "dl3", "dr1", "dr2", "dr3",
                                        "energy", "bc_residual", "particles"});
        for (const auto& r : tr.rows) {
            std::vector<double> row{r.t};
            for (int i = 0; i < 3; ++i) row.push_back(r.ell[i]);
            for (int i = 0; i < 3; ++i) row.push_back(r.rot[i]);
            for (int i = 0; i < 6; ++i) row.push_back(r.rate[i]);
            row.push_back(r.energy);
            row.push_back(r.bc_residual);
            row.push_back(static_cast<double>(r.particles));
            w.row(row);
        }
    }
    std::vector<double> t;
    std::vector<Vec3d> ell, rot;
    for (const auto& r : tr.rows) {
        t.push_back(r.t);
        ell.push_back(r.ell);
        rot.push_back(r.rot);
    }
    motion::BodyMotion mo = motion::reconstruct_world_frame(t, ell, rot);
    write_motion_csv(out / "motion.csv", mo);

    Checkpoint ck;
    ck.meta = {{"solver", "euler"}, {"config", to_ini(c)}};
    CheckpointArray at{"t", {t.size()}, t}, body{"body", {t.size(), 6}, {}};
    for (std::size_t n = 0; n < t.size(); ++n) {
        for (int i = 0; i < 3; ++i) body.data.push_back(ell[n][i]);
        for (int i = 0; i < 3; ++i) body.data.push_back(rot[n][i]);
    }
    ck.arrays = {at, body};
    write_checkpoint(out / "trajectory.rgf", ck);

    Json s;
    s["command"] = "run";
    s["solver"] = "euler";
    s["particles"] = s0.field.size();
    s["eps"] = num(s0.field.eps);
    s["steps"] = tr.rows.empty() ? 0 : tr.rows.size() - 1;
    s["energy_initial"] = num(tr.rows.front().energy);
    s["energy_final"] = num(tr.rows.back().energy);
    s["energy_drift"] = num(tr.energy_drift());
    s["bc_residual_max"] = num(tr.max_bc_residual());
    s["reflections"] = tr.reflections;
    s["l_final"] = vec_json(tr.rows.back().ell);
    s["r_final"] = vec_json(tr.rows.back().rot);
    s["motion"] = motion_json(mo);
    write_json(out / "summary.json", s);
    return kOk;
}

// Solver failures are reported, with the artifacts written so far kept.
template <class F>
int guarded(F f, std::ostream& log) {
    try {
        return f();
    } catch (const ConfigError& e) {
        log << e.what() << "\n";
        return kConfigError;
    } catch (const studies::StudyFailure& e) {
        log << "ledger violation: " << e.what() << "\n";
        return kLedgerViolation;
    } catch (const std::exception& e) {
        log << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    }
}

inline fs::path prepare_output(const RunConfig& c, const std::string& sub = {}) {
    fs::path out = output_root(c.output_dir);
    if (!sub.empty()) out /= sub;
    fs::create_directories(out);
    std::ofstream(out / "config.ini", std::ios::binary) << to_ini(c);
    return out;
}

inline int cmd_run(const RunConfig& c, std::ostream& log) {
    return guarded([&] {
        fs::path out = prepare_output(c);
        if (c.solver == SolverKind::Euler) return run_euler_command(c, out, log);
        return run_viscous_command(c, out, log);
    }, log);
}

// ---------------------------------------------------------------------------

inline Json fit_json(const studies::SlopeFit& f) {
    return {{"slope", num(f.slope)}, {"stderr", num(f.slope_stderr)}, {"points", f.points},
            {"dropped_coarsest", f.dropped_coarsest}};
}

inline int sweep_inviscid(const RunConfig& c, const fs::path& out, std::ostream& log) {
    if (c.shape != "sphere") throw ConfigError("field 'body.shape'", "the Galerkin basis needs shape = sphere");
    studies::InviscidLimitConfig ic;
    ic.nu_grid = c.nu_grid;
    ic.alpha_grid = c.alpha_grid;
    ic.main_alpha = c.alpha.power ? 1.0 : c.alpha.value;
    ic.friction_power = c.friction_power;
    ic.T = c.T;
    ic.dt = c.dt;
    ic.ell0 = c.ell0;
    ic.rot0 = c.rot0;
    ic.setup = setup_options(c);
    ic.image_degree = c.image_degree;
    ic.slack_tolerance = c.slack_tolerance;
    CsvWriter w(out / "points.csv", {"family", "nu", "alpha", "w_linf_h", "w_h1", "w_slip", "body_h1", "body_h1_am", "u_h1",
                                     "u_slip", "w0_h", "derivative_gap", "resampling_gap", "min_slack"});
    ic.on_point = [&](const std::string& fam, const studies::RatePoint& p) {
        w.row(fam, {p.nu, p.alpha, p.w_linf_h, p.w_h1, p.w_slip, p.body_h1, p.body_h1_am, p.u_h1, p.u_slip, p.w0_h,
                    p.derivative_gap, p.resampling_gap, p.min_slack});
        log << fam << " nu = " << p.nu << ": ||w||_LinfH = " << p.w_linf_h << "\n";
    };
    auto rep = studies::inviscid_limit_study(make_body(c), ic);

    Json s;
    s["command"] = "sweep";
    s["study"] = "inviscid";
    s["nu_grid"] = c.nu_grid;
    s["euler_energy_drift"] = num(rep.euler_energy_drift);
    s["euler_bc_residual"] = num(rep.euler_bc_residual);
    s["families"] = Json::array();
    for (const auto& f : rep.families) {
        Json j;
        j["label"] = f.label;
        j["slope_w_linf_h"] = fit_json(f.slope_h);
        j["slope_w_h1"] = fit_json(f.slope_h1);
        j["slope_body_h1"] = fit_json(f.slope_body);
        j["constant"] = num(f.constant);
        j["constant_over_1_plus_alpha"] = num(f.constant_C);
        j["w_linf_h_decreasing"] = f.monotone_h;
        j["body_h1_decreasing"] = f.monotone_body;
        j["resampling_gap"] = num(f.resampling_gap);
        s["families"].push_back(j);
    }
    s["main_family"] = rep.main_family;
    s["alpha_grid"] = rep.alpha_grid;
    Json cs = Json::array();
    for (double k : rep.constants) cs.push_back(num(k));
    s["pinned_constants"] = cs;
    s["constants_increasing"] = rep.constants_increasing;
    const auto& m = rep.families[rep.main_family];
    s["pass"] = {{"w_linf_h_decreasing", m.monotone_h},
                 {"slope_in_band", m.slope_h.slope >= 0.5 && m.slope_h.slope <= 1.1},
                 {"constants_increasing", rep.constants_increasing},
                 {"body_h1_decreasing", m.monotone_body}};
    write_json(out / "summary.json", s);
    if (c.plot) {
        std::vector<PlotSeries> a, b;
        for (const auto& f : rep.families) {
            a.push_back({f.label, f.grid(), f.column([](const studies::RatePoint& p) { return p.w_linf_h; }), f.slope_h.slope});
            b.push_back({f.label, f.grid(), f.column([](const studies::RatePoint& p) { return p.body_h1; }), f.slope_body.slope});
        }
        write_loglog_svg(out / "w_linf_h.svg", "max_t ||u - u^E||_H", "nu", "error", a);
        write_loglog_svg(out / "body_h1.svg", "body velocity error in H1(0,T)", "nu", "error", b);
    }
    return kOk;
}

inline int sweep_inertia(const RunConfig& c, const fs::path& out, std::ostream& log, studies::InertiaSystem which) {
    studies::InertiaConfig ic;
    ic.sigma_grid = c.sigma_grid;
    ic.T = c.T;
    ic.dt = c.dt;
    ic.nu = c.nu;
    ic.alpha = c.alpha.at(c.nu);
    ic.seed = c.seed;
    ic.amplitude = c.amplitude;
    ic.setup = setup_options(c);
    ic.slack_tolerance = c.slack_tolerance;
    ic.ring = ring_spec(c);
    ic.euler.T = c.T;
    ic.euler.dt = c.dt;
    ic.image_degree = c.image_degree;
    CsvWriter w(out / "points.csv", {"sigma", "body_h1", "body_sup", "rate_sup", "fluid_distance", "min_slack",
                                     "resampling_gap"});
    ic.on_point = [&](const studies::InertiaPoint& p) {
        w.row({p.sigma, p.body_h1, p.body_sup, p.rate_sup, p.fluid_distance, p.min_slack, p.resampling_gap});
        log << "sigma = " << p.sigma << ": body " << (which == studies::InertiaSystem::Viscous ? p.body_h1 : p.body_sup)
            << ", fluid distance " << p.fluid_distance << "\n";
    };
    auto rep = studies::infinite_inertia_study(make_body(c), ic, which);
    Json s;
    s["command"] = "sweep";
    s["study"] = which == studies::InertiaSystem::Viscous ? "inertia-viscous" : "inertia-euler";
    s["sigma_grid"] = c.sigma_grid;
    s["local_radius"] = num(rep.local_radius);
    if (which == studies::InertiaSystem::Viscous) s["reference_min_slack"] = num(rep.reference_min_slack);
    s["body_slope"] = fit_json(rep.body_slope);
    s["fluid_slope"] = fit_json(rep.fluid_slope);
    s["resampling_gap"] = num(rep.resampling_gap);
    s["pass"] = {{"body_decreasing", rep.body_decreasing}, {"fluid_decreasing", rep.fluid_decreasing}};
    write_json(out / "summary.json", s);
    if (c.plot) {
        std::vector<double> sg, body, fluid;
        for (const auto& p : rep.points) {
            sg.push_back(p.sigma);
            body.push_back(which == studies::InertiaSystem::Viscous ? p.body_h1 : p.body_sup);
            fluid.push_back(p.fluid_distance);
        }
        write_loglog_svg(out / "inertia.svg", "infinite-inertia limit", "sigma", "norm",
                         {{"body velocity", sg, body, rep.body_slope.slope}, {"fluid distance", sg, fluid, rep.fluid_slope.slope}});
    }
    return kOk;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& log) {
    return guarded([&] {
        fs::path out = prepare_output(c);
        switch (c.study) {
            case StudyKind::Inviscid: return sweep_inviscid(c, out, log);
            case StudyKind::InertiaViscous: return sweep_inertia(c, out, log, studies::InertiaSystem::Viscous);
            case StudyKind::InertiaEuler: return sweep_inertia(c, out, log, studies::InertiaSystem::Euler);
        }
        return static_cast<int>(kConfigError);
    }, log);
}

// ---------------------------------------------------------------------------

inline int cmd_added_mass(const RunConfig& c, std::ostream& out_stream, std::ostream& log) {
    return guarded([&] {
        fs::path out = prepare_output(c);
        auto k = kirchhoff::make_kirchhoff(make_body(c));
        const bool bem = !k.spec.is_sphere();
        Json s;
        s["command"] = "added-mass";
        s["path"] = bem ? "bem" : "analytic";
        if (bem) s["faces"] = k.spec.mesh->faces.size();
        s["M1"] = mat_json(k.M1);
        s["M2"] = mat_json(k.M2);
        s["M"] = mat_json(k.M);
        s["M2_asymmetry"] = num(k.asymmetry);
        write_json(out / "added_mass.json", s);
        CsvWriter w(out / "added_mass.csv", {"row", "M2_1", "M2_2", "M2_3", "M2_4", "M2_5", "M2_6"});
        for (int i = 0; i < 6; ++i) {
            std::vector<double> r{static_cast<double>(i + 1)};
            for (int j = 0; j < 6; ++j) r.push_back(k.M2(i, j));
            w.row(r);
        }
        out_stream << s.dump(2) << "\n";
        return static_cast<int>(kOk);
    }, log);
}

inline int cmd_verify(const RunConfig& c, const VerifyConfig& base, std::ostream& out_stream, std::ostream& log) {
    return guarded([&] {
        fs::path out = prepare_output(c);
        VerifyConfig vc = base;
        vc.setup = setup_options(c);
        vc.seed = c.seed;
        VerifyReport r = run_verify(make_body(c), vc);
        {
            CsvWriter w(out / "monitors.csv", {"monitor", "index", "param", "lhs", "rhs", "holds"});
            for (const auto& m : r.samples) w.row(m.name, {double(m.index), m.param, m.lhs, m.rhs, m.holds ? 1.0 : 0.0});
        }
        Json s;
        s["command"] = "verify";
        s["quadrature_tolerance"] = num(r.quadrature_tolerance);
        s["trace_constant_fitted"] = num(r.trace_constant);
        auto checks = [](const std::vector<Check>& v) {
            Json a = Json::array();
            for (const auto& c : v) a.push_back({{"name", c.name}, {"value", num(c.value)}, {"tolerance", num(c.tolerance)}, {"pass", c.pass}});
            return a;
        };
        s["identities"] = checks(r.identities);
        s["monitors"] = checks(r.monitors);
        s["violations"] = r.violations;
        write_json(out / "verify.json", s);
        for (const auto& ch : r.identities)
            out_stream << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.value << " (tol " << ch.tolerance << ")\n";
        for (const auto& ch : r.monitors)
            out_stream << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.value << " (tol " << ch.tolerance << ")\n";
        out_stream << "monitor violations: " << r.violations << "\n";
        return static_cast<int>(r.identities_pass() && r.monitors_pass() ? kOk : kLedgerViolation);
    }, log);
}

}  // namespace rigidflow::cli
