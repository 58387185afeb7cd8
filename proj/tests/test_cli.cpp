#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rigidflow/cli/config.hpp"
#include "rigidflow/cli/output.hpp"

using namespace rigidflow;
using namespace rigidflow::cli;

#ifndef RIGIDFLOW_CLI_BINARY
#define RIGIDFLOW_CLI_BINARY "rigidflow"
#endif
#ifndef RIGIDFLOW_SOURCE_DIR
#define RIGIDFLOW_SOURCE_DIR "."
#endif

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("rigidflow_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args, const fs::path& log) {
    std::string cmd = std::string(RIGIDFLOW_CLI_BINARY) + " " + args + " > " + log.string() + " 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// a short, small viscous run
const std::string kQuick = "--N 12 --T 0.1 --dt 0.02 --set solver.surface_order=8 --set solver.radial_order=8";

}  // namespace

TEST(Config, RoundTripThroughIni) {
    RunConfig c;
    c.nu = 3.3e-3;
    c.alpha = AlphaRule::parse("nu_pow:-0.5");
    c.ell0 = Vec3d(0.1, 1.0 / 3.0, -2);
    c.nu_grid = {0.1, 0.05};
    c.solver = SolverKind::FixedBody;
    c.study = StudyKind::InertiaEuler;
    c.seed = 123456789012345ull;
    RunConfig r = from_ini(Ini::parse_string(to_ini(c)));
    EXPECT_TRUE(r == c);
    EXPECT_EQ(to_ini(r), to_ini(c));
}

TEST(Config, SampleConfigsLoad) {
    for (const auto& e : fs::directory_iterator(fs::path(RIGIDFLOW_SOURCE_DIR) / "configs")) {
        if (e.path().extension() != ".ini") continue;
        EXPECT_NO_THROW(from_ini(Ini::load(e.path().string()))) << e.path();
    }
}

TEST(Config, ErrorsNameTheLine) {
    try {
        from_ini(Ini::parse_string("[solver]\nnu = 0.01\ndt = fast\n", "x.ini"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("x.ini:3"), std::string::npos) << e.what();
    }
    try {
        from_ini(Ini::parse_string("[solver]\nnu = 0.01\nnuu = 0.02\n", "y.ini"));
        FAIL();
    } catch (const ConfigError& e) {
        std::string w = e.what();
        EXPECT_NE(w.find("y.ini:3"), std::string::npos) << w;
        EXPECT_NE(w.find("unknown key"), std::string::npos) << w;
    }
    EXPECT_THROW(Ini::parse_string("[solver\nnu = 1\n"), ConfigError);
    EXPECT_THROW(Ini::parse_string("nu = 1\n"), ConfigError);
    EXPECT_THROW(Ini::parse_string("[a]\nx = 1\nx = 2\n"), ConfigError);
    EXPECT_THROW(from_ini(Ini::parse_string("[solver]\nnu = -1\n")), ConfigError);
    EXPECT_THROW(from_ini(Ini::parse_string("[solver]\nN = 2.5\n")), ConfigError);
    EXPECT_THROW(from_ini(Ini::parse_string("[solver]\nkind = stokes\n")), ConfigError);
}

TEST(Config, AlphaRules) {
    EXPECT_EQ(AlphaRule::parse("2.5").at(0.01), 2.5);
    EXPECT_NEAR(AlphaRule::parse("nu_pow:-0.5").at(0.01), 10.0, 1e-12);
    EXPECT_THROW(AlphaRule::parse("-1"), ConfigError);
    EXPECT_THROW(AlphaRule::parse("nu_pow:"), ConfigError);
    EXPECT_THROW(AlphaRule::parse("1x"), ConfigError);
}

TEST(Output, CsvKeepsSeventeenDigits) {
    fs::path d = scratch("csv");
    const double x = 0.1 + 0.2, y = 1.0 / 3.0;
    {
        CsvWriter w(d / "a.csv", {"x", "y"});
        w.row({x, y});
        EXPECT_THROW(w.row({1.0}), std::invalid_argument);
    }
    std::ifstream in(d / "a.csv");
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    EXPECT_EQ(header, "x,y");
    auto comma = line.find(',');
    EXPECT_EQ(std::stod(line.substr(0, comma)), x);
    EXPECT_EQ(std::stod(line.substr(comma + 1)), y);
}

TEST(Output, CheckpointRoundTripIsBitExact) {
    fs::path d = scratch("ckpt");
    Checkpoint c;
    c.meta = {{"solver", "viscous"}, {"N", 3}};
    c.arrays = {{"t", {3}, {0.0, 0.1, 0.30000000000000004}},
                {"G", {2, 2}, {1.0 / 3.0, -0.0, 5e-324, 1.7976931348623157e308}}};
    write_checkpoint(d / "a.rgf", c);
    Checkpoint r = read_checkpoint(d / "a.rgf");
    EXPECT_EQ(r.meta, c.meta);
    ASSERT_EQ(r.arrays.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(r.arrays[i].name, c.arrays[i].name);
        EXPECT_EQ(r.arrays[i].shape, c.arrays[i].shape);
        EXPECT_EQ(std::memcmp(r.arrays[i].data.data(), c.arrays[i].data.data(), c.arrays[i].data.size() * 8), 0);
    }
    std::string bytes = slurp(d / "a.rgf");
    EXPECT_EQ(bytes.substr(0, 8), "RGFLOW01");
    std::ofstream(d / "trail.rgf", std::ios::binary) << bytes << 'x';
    EXPECT_THROW(read_checkpoint(d / "trail.rgf"), std::runtime_error);
    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream(d / "magic.rgf", std::ios::binary) << bad;
    EXPECT_THROW(read_checkpoint(d / "magic.rgf"), std::runtime_error);
    std::ofstream(d / "short.rgf", std::ios::binary) << bytes.substr(0, bytes.size() - 4);
    EXPECT_THROW(read_checkpoint(d / "short.rgf"), std::runtime_error);
}

TEST(Binary, BadConfigExitsWithTwo) {
    fs::path d = scratch("badcfg");
    std::ofstream(d / "bad.ini") << "[solver]\nnu = zero\n";
    EXPECT_EQ(run_cli("run -c " + (d / "bad.ini").string() + " -o " + (d / "o").string(), d / "log"), 2);
    EXPECT_NE(slurp(d / "log").find("bad.ini:2"), std::string::npos);
    EXPECT_EQ(run_cli("run -c " + (d / "missing.ini").string(), d / "log"), 2);
    EXPECT_EQ(run_cli("run --set nope=1", d / "log"), 2);
    EXPECT_EQ(run_cli("frobnicate", d / "log"), 2);
    // fixed body must start at rest
    EXPECT_EQ(run_cli("run --solver fixed-body --set initial.ell=1,0,0 -o " + (d / "o").string(), d / "log"), 2);
}

TEST(Binary, RunWritesArtifactsAndIsDeterministic) {
    fs::path d = scratch("determinism");
    std::string base = "run -c " + std::string(RIGIDFLOW_SOURCE_DIR) + "/configs/viscous_sphere.ini " + kQuick;
    // same output directory both times: the checkpoint records the config
    ASSERT_EQ(run_cli(base + " -o " + (d / "a").string(), d / "log_a"), 0) << slurp(d / "log_a");
    fs::rename(d / "a", d / "b");
    ASSERT_EQ(run_cli(base + " -o " + (d / "a").string(), d / "log_b"), 0) << slurp(d / "log_b");
    for (const char* f : {"summary.json", "ledger.csv", "motion.csv", "trajectory.rgf", "config.ini"})
        EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
    // the saved config reproduces the run
    RunConfig c = from_ini(Ini::load((d / "a" / "config.ini").string()));
    EXPECT_EQ(c.N, 12);
    Checkpoint ck = read_checkpoint(d / "a" / "trajectory.rgf");
    EXPECT_EQ(ck.array("t").data.size(), 6u);
    EXPECT_EQ(ck.array("G").shape, (std::vector<std::size_t>{6, 12}));
    auto s = Json::parse(slurp(d / "a" / "summary.json"));
    EXPECT_TRUE(s["ledger_ok"].get<bool>());
}

TEST(Binary, SeedChangesTheRandomData) {
    fs::path d = scratch("seed");
    std::string base = "run -c " + std::string(RIGIDFLOW_SOURCE_DIR) + "/configs/viscous_sphere.ini " + kQuick;
    ASSERT_EQ(run_cli(base + " --seed 1 -o " + (d / "a").string(), d / "log"), 0);
    ASSERT_EQ(run_cli(base + " --seed 2 -o " + (d / "b").string(), d / "log"), 0);
    EXPECT_NE(slurp(d / "a" / "summary.json"), slurp(d / "b" / "summary.json"));
}

TEST(Binary, AddedMassPrintsTensor) {
    fs::path d = scratch("am");
    ASSERT_EQ(run_cli("added-mass -c " + std::string(RIGIDFLOW_SOURCE_DIR) + "/configs/added_mass_sphere.ini -o " +
                          (d / "o").string(),
                      d / "log"),
              0);
    auto s = Json::parse(slurp(d / "o" / "added_mass.json"));
    EXPECT_EQ(s["path"], "analytic");
    // sphere of radius 1: M2 = diag(2 pi / 3, 2 pi / 3, 2 pi / 3, 0, 0, 0)
    EXPECT_NEAR(s["M2"][0][0].get<double>(), 2 * M_PI / 3, 1e-12);
    EXPECT_NEAR(s["M2"][4][4].get<double>(), 0.0, 1e-12);
}

TEST(Binary, InertiaSweepIsDeterministic) {
    fs::path d = scratch("sweep");
    std::string base = "sweep --study inertia-viscous " + kQuick + " --set study.sigma_grid=1,10 --set study.plot=false";
    ASSERT_EQ(run_cli(base + " -o " + (d / "a").string(), d / "log"), 0) << slurp(d / "log");
    fs::rename(d / "a", d / "b");
    ASSERT_EQ(run_cli(base + " -o " + (d / "a").string(), d / "log"), 0);
    EXPECT_EQ(slurp(d / "a" / "points.csv"), slurp(d / "b" / "points.csv"));
    EXPECT_EQ(slurp(d / "a" / "summary.json"), slurp(d / "b" / "summary.json"));
}
