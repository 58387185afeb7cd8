// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "rigidflow/cli/app.hpp"

using namespace rigidflow;
namespace rc = rigidflow::cli;
namespace fs = std::filesystem;

#ifndef RIGIDFLOW_CLI_BINARY
#define RIGIDFLOW_CLI_BINARY "rigidflow"
#endif
#ifndef RIGIDFLOW_SOURCE_DIR
#define RIGIDFLOW_SOURCE_DIR "."
#endif

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    failures += !o.pass;
    char buf[64];
    std::snprintf(buf, sizeof buf, " [%.1f s]", secs);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail << buf
              << std::endl;
}

std::string fmt(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("rigidflow_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args, const fs::path& log) {
    std::string cmd = std::string(RIGIDFLOW_CLI_BINARY) + " " + args + " > " + log.string() + " 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config(const std::string& name) { return std::string(RIGIDFLOW_SOURCE_DIR) + "/configs/" + name; }

Eigen::MatrixXd matrix(const rc::Json& j) {
    Eigen::MatrixXd m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i)
        for (std::size_t k = 0; k < j[i].size(); ++k) m(i, k) = j[i][k].get<double>();
    return m;
}

// reference viscous runs shared by criteria 3 and 4
struct ReferenceRuns {
    viscous::ViscousSetup S;
    std::vector<std::pair<double, viscous::ViscousTrajectory>> runs;
};

const ReferenceRuns& reference_runs() {
    static const ReferenceRuns R = [] {
        ReferenceRuns r;
        viscous::ViscousSetupOptions o;
        o.N = 30;
        r.S = viscous::make_viscous_setup(geometry::RigidBodySpec::sphere(1.0), o);
        const int N = r.S.system.N;
        Eigen::VectorXd G0 = viscous::potential_coefficients(N, Vec3d(0, 0, 0.5), Vec3d(0.2, 0, 0));
        G0.tail(N - 6) = studies::random_fluid_state(N, 7, 0.3).tail(N - 6);
        for (double nu : {1e-1, 1e-2}) {
            viscous::ViscousParams p;
            p.nu = nu;
            p.alpha = 1.0;
            p.T = 1.0;
            p.dt = 1e-2;
            r.runs.emplace_back(nu, viscous::integrate(r.S.system, G0, p));
        }
        return r;
    }();
    return R;
}

}  // namespace

int main() {
    std::cout << std::unitbuf;

    criterion(1, "added-mass oracle", [] {
        fs::path d = scratch("c1");
        auto t0 = Clock::now();
        if (run_cli("added-mass -c " + config("added_mass_sphere.ini") + " -o " + (d / "s").string(), d / "log") != 0)
            return Outcome{false, "analytic run failed"};
        if (run_cli("added-mass -c " + config("added_mass_icosphere.ini") + " -o " + (d / "b").string(), d / "log") != 0)
            return Outcome{false, "BEM run failed"};
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        Eigen::MatrixXd exact = Eigen::MatrixXd::Zero(6, 6);
        exact.diagonal().head(3).setConstant(2 * M_PI / 3);
        auto sj = rc::Json::parse(slurp(d / "s" / "added_mass.json"));
        auto bj = rc::Json::parse(slurp(d / "b" / "added_mass.json"));
        double ea = (matrix(sj["M2"]) - exact).cwiseAbs().maxCoeff();
        double eb = (matrix(bj["M2"]) - exact).norm() / exact.norm();
        bool ok = ea <= 1e-10 && eb <= 1e-3 && secs < 60 && bj["faces"].get<int>() >= 5000;
        return Outcome{ok, "analytic max error " + fmt(ea) + " (<= 1e-10), BEM on " + std::to_string(bj["faces"].get<int>()) +
                               " faces relative " + fmt(eb) + " (<= 1e-3), " + fmt(secs) + " s (< 60)"};
    });

    rc::VerifyReport verify;
    double verify_secs = 0;
    criterion(2, "identity suite", [&] {
        auto t0 = Clock::now();
        rc::VerifyConfig vc;
        vc.pairs = 200;
        verify = rc::run_verify(geometry::RigidBodySpec::sphere(1.0), vc);
        verify_secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::string d;
        for (const auto& c : verify.identities) d += c.name + " " + fmt(c.value) + " (<= " + fmt(c.tolerance) + "); ";
        return Outcome{verify.identities_pass() && verify_secs < 300, d + "200 pairs, " + fmt(verify_secs) + " s (< 300)"};
    });

    criterion(3, "viscous energy inequality", [] {
        const auto& R = reference_runs();
        bool ok = true;
        std::string d;
        for (const auto& [nu, tr] : R.runs) {
            double s = tr.min_slack() / tr.norm0_sq;
            ok = ok && s >= -1e-8 && tr.ledger.size() == tr.t.size();
            d += "nu " + fmt(nu) + ": min slack " + fmt(s) + " over " + std::to_string(tr.t.size() - 1) + " steps; ";
        }
        return Outcome{ok, d + "need >= -1e-8 relative to ||u0||_H^2, N = 30, T = 1"};
    });

    criterion(4, "added-mass regularity", [] {
        const auto& R = reference_runs();
        bool ok = true;
        std::string d;
        for (const auto& [nu, tr] : R.runs) {
            auto c = rc::added_mass_check(R.S, tr, nu, 1.0);
            ok = ok && c.relative < 1e-3 && c.samples > 0;
            d += "nu " + fmt(nu) + ": " + fmt(c.relative) + " on " + std::to_string(c.samples) + " samples; ";
        }
        return Outcome{ok, d + "need < 1e-3"};
    });

    criterion(5, "Euler conservation", [] {
        auto k = kirchhoff::make_kirchhoff(geometry::RigidBodySpec::sphere(1.0));
        forms::FormsContext ctx;
        ctx.quad = geometry::make_quadrature(k.spec, 12, 12, 3.0);
        ctx.m = k.inertia.m;
        ctx.J = k.inertia.J;
        ctx.chi = geometry::CutoffField(k.spec, 0.25);
        auto g = euler::make_euler_geometry(k, ctx, 20);
        euler::EulerState s;
        s.field = euler::seed_ring(euler::RingSpec{});
        euler::EulerParams p;
        p.T = 0.25;
        p.dt = 0.05;
        p.keep_snapshots = false;
        auto tr = euler::run_euler(g, s, p);
        double drift = tr.energy_drift(), bc = tr.max_bc_residual();
        std::size_t measured = 0;
        for (const auto& r : tr.rows) measured += !std::isnan(r.energy);
        bool ok = drift < 1e-4 && bc < 1e-6 && measured == tr.rows.size();
        return Outcome{ok, std::to_string(s.field.size()) + " particles, T = 0.25: energy drift " + fmt(drift) +
                               " (< 1e-4), max BC residual " + fmt(bc) + " (< 1e-6) over " + std::to_string(tr.rows.size()) +
                               " records"};
    });

    studies::InviscidLimitReport inviscid;
    bool inviscid_ok = false;
    criterion(6, "inviscid-limit rates", [&] {
        studies::InviscidLimitConfig c;
        c.friction_family = false;
        inviscid = studies::inviscid_limit_study(geometry::RigidBodySpec::sphere(1.0), c);
        inviscid_ok = true;
        const auto& f = inviscid.families[inviscid.main_family];
        double s = f.slope_h.slope;
        std::string ks;
        for (std::size_t i = 0; i < inviscid.constants.size(); ++i)
            ks += (i ? ", " : "") + fmt(inviscid.constants[i]);
        bool ok = f.monotone_h && s >= 0.5 && s <= 1.1 && inviscid.constants_increasing;
        return Outcome{ok, std::string("||w||_LinfH ") + (f.monotone_h ? "strictly decreasing" : "NOT decreasing") +
                               ", slope " + fmt(s) + " +- " + fmt(f.slope_h.slope_stderr) + (f.slope_h.dropped_coarsest ? " (coarsest dropped)" : "") +
                               " (in [0.5, 1.1], target 0.75), K(alpha = 0.5, 1, 2) = " + ks +
                               (inviscid.constants_increasing ? " increasing" : " NOT increasing")};
    });

    criterion(7, "body H1 convergence", [&] {
        if (!inviscid_ok) return Outcome{false, "inviscid study did not complete"};
        auto b = studies::body_h1_report(inviscid.families[inviscid.main_family]);
        std::string v;
        for (const auto& r : b.rows) v += (v.empty() ? "" : ", ") + fmt(r.h1_fd);
        return Outcome{b.decreasing, "||(l,r) - (l^E,r^E)||_H1 = " + v + (b.decreasing ? " strictly decreasing" : " NOT decreasing")};
    });

    criterion(8, "infinite-inertia studies", [] {
        auto body = geometry::RigidBodySpec::sphere(1.0);
        studies::InertiaConfig c;
        auto vr = studies::infinite_inertia_viscous(body, c);
        auto er = studies::infinite_inertia_euler(body, c);
        auto describe = [](const studies::InertiaReport& r, bool viscous) {
            std::string s;
            for (const auto& p : r.points) s += (s.empty() ? "" : ", ") + fmt(viscous ? p.body_h1 : p.body_sup);
            std::string f;
            for (const auto& p : r.points) f += (f.empty() ? "" : ", ") + fmt(p.fluid_distance);
            return "body " + s + (r.body_decreasing ? " decreasing" : " NOT decreasing") + "; fluid " + f +
                   (r.fluid_decreasing ? " decreasing" : " NOT decreasing");
        };
        bool ok = vr.body_decreasing && vr.fluid_decreasing && er.body_decreasing && er.fluid_decreasing;
        return Outcome{ok, "viscous: " + describe(vr, true) + " | Euler: " + describe(er, false)};
    });

    criterion(9, "inequality monitors", [&] {
        if (verify.samples.empty()) return Outcome{false, "verify suite did not run"};
        std::string d;
        for (const auto& c : verify.monitors) d += c.name + " max " + fmt(c.value) + "; ";
        return Outcome{verify.monitors_pass(), d + std::to_string(verify.samples.size()) + " samples, " +
                                                   std::to_string(verify.violations) + " violations"};
    });

    criterion(10, "determinism", [] {
        fs::path d = scratch("c10");
        std::string args = "run -c " + config("viscous_sphere.ini") + " -o " + (d / "out").string();
        if (run_cli(args, d / "log") != 0) return Outcome{false, "first run failed: " + slurp(d / "log")};
        std::string a = slurp(d / "out" / "summary.json");
        fs::remove_all(d / "out");
        if (run_cli(args, d / "log") != 0) return Outcome{false, "second run failed"};
        std::string b = slurp(d / "out" / "summary.json");
        bool ok = !a.empty() && a == b;
        return Outcome{ok, std::string("summary.json ") + (ok ? "byte-identical" : "differs") + " across two runs (" +
                               std::to_string(a.size()) + " bytes)"};
    });

    std::cout << (failures ? "FAILED: " + std::to_string(failures) + " criteria" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
