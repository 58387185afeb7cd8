// rigidflow: run, sweep, added-mass, verify.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rigidflow/cli/app.hpp"

namespace rc = rigidflow::cli;

namespace {

struct Overrides {
    std::string config;
    std::vector<std::string> sets;
    std::optional<double> nu, T, dt;
    std::optional<std::string> alpha, out, solver, study;
    std::optional<int> N;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("-c,--config", o.config, "INI config file");
    sub->add_option("--set", o.sets, "override, section.key=value (repeatable)");
    sub->add_option("--nu", o.nu, "solver.nu");
    sub->add_option("--alpha", o.alpha, "solver.alpha (number or nu_pow:p)");
    sub->add_option("--T", o.T, "solver.T");
    sub->add_option("--dt", o.dt, "solver.dt");
    sub->add_option("--N", o.N, "solver.N");
    sub->add_option("--solver", o.solver, "solver.kind");
    sub->add_option("--study", o.study, "study.kind");
    sub->add_option("--seed", o.seed, "output.seed");
    sub->add_option("-o,--out", o.out, "output.dir");
}

rc::RunConfig load(const Overrides& o) {
    rc::Ini ini = o.config.empty() ? rc::Ini{} : rc::Ini::load(o.config);
    auto put = [&](const std::string& k, const std::string& v) { ini.set(k + "=" + v); };
    for (const auto& s : o.sets) ini.set(s);
    if (o.nu) put("solver.nu", rc::fmt17(*o.nu));
    if (o.alpha) put("solver.alpha", *o.alpha);
    if (o.T) put("solver.T", rc::fmt17(*o.T));
    if (o.dt) put("solver.dt", rc::fmt17(*o.dt));
    if (o.N) put("solver.N", std::to_string(*o.N));
    if (o.solver) put("solver.kind", *o.solver);
    if (o.study) put("study.kind", *o.study);
    if (o.seed) put("output.seed", std::to_string(*o.seed));
    if (o.out) put("output.dir", *o.out);
    return rc::from_ini(ini);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigid body in an incompressible fluid, body frame"};
    app.require_subcommand(1);
    Overrides o;
    auto* run = app.add_subcommand("run", "one viscous, fixed-body or Euler run");
    auto* sweep = app.add_subcommand("sweep", "inviscid-limit or infinite-inertia study");
    auto* am = app.add_subcommand("added-mass", "virtual inertia tensor of a body");
    auto* verify = app.add_subcommand("verify", "identity and inequality monitor suite");
    for (auto* s : {run, sweep, am, verify}) add_common(s, o);
    rc::VerifyConfig vc;
    verify->add_option("--pairs", vc.pairs, "random pairs for b, b_R and the added-mass identity");
    verify->add_option("--monitor-samples", vc.monitor_samples, "samples per inequality monitor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc_ = app.exit(e);
        return rc_ == 0 ? 0 : rc::kConfigError;
    }

    rc::RunConfig c;
    try {
        c = load(o);
    } catch (const rc::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return rc::kConfigError;
    }
    if (*run) return rc::cmd_run(c, std::cerr);
    if (*sweep) return rc::cmd_sweep(c, std::cerr);
    if (*am) return rc::cmd_added_mass(c, std::cout, std::cerr);
    return rc::cmd_verify(c, vc, std::cout, std::cerr);
}
