#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lentparticle/cli.hpp"

using namespace lp::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("lentparticle-test-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Settings quick(const fs::path& out) {
    Settings s;
    s.output_dir = out;
    s.n_paths = 200;
    s.n_marks = 200;
    s.n_mark_paths = 2;
    s.n_pathwise = 20;
    return s;
}

}  // namespace

TEST_CASE("config file parsing") {
    Settings s;
    std::istringstream in(
        "[measure]\nname = uniform\ntrunc_a = 0.2\n"
        "[experiment]\nT = 2.5\nn_paths = 123\nseed = 9\n"
        "[functional]\nphi_coeffs = 1, -0.5, 2\n"
        "[output]\nformats = csv\n"
        "[verify]\nchecks = isometry, gamma-closed-form\n");
    apply_config(s, in);
    CHECK(s.measure == "uniform");
    CHECK(s.trunc_a == 0.2);
    CHECK(s.horizon == 2.5);
    CHECK(s.n_paths == 123);
    CHECK(s.seed == 9);
    CHECK(s.phi_coeffs == std::vector<double>{1.0, -0.5, 2.0});
    CHECK(s.formats == std::vector<std::string>{"csv"});
    CHECK(s.checks == std::vector<std::string>{"isometry", "gamma-closed-form"});

    Settings bad;
    std::istringstream unknown("[measure]\nflavour = mint\n");
    CHECK_THROWS_AS(apply_config(bad, unknown), ConfigError);
    std::istringstream malformed("[experiment]\nn_paths = many\n");
    CHECK_THROWS_AS(apply_config(bad, malformed), ConfigError);
}

TEST_CASE("precedence: flags over config over defaults") {
    const fs::path dir = scratch("precedence");
    const fs::path cfg = dir / "run.ini";
    std::ofstream(cfg) << "[experiment]\nseed = 7\nn_paths = 500\nT = 2.0\n";

    const Settings defaults = resolve_settings(std::nullopt, {});
    CHECK(defaults.seed == 42);
    CHECK(defaults.n_paths == 100000);

    const Settings from_file = resolve_settings(cfg, {});
    CHECK(from_file.seed == 7);
    CHECK(from_file.n_paths == 500);
    CHECK(from_file.horizon == 2.0);
    CHECK(from_file.measure == defaults.measure);

    Overrides flags;
    flags.seed = 11;
    flags.phi = "0.5,1";
    flags.measure = "uniform";
    const Settings both = resolve_settings(cfg, flags);
    CHECK(both.seed == 11);
    CHECK(both.n_paths == 500);
    CHECK(both.measure == "uniform");
    CHECK(both.phi_coeffs == std::vector<double>{0.5, 1.0});

    CHECK_THROWS_AS(resolve_settings(dir / "missing.ini", {}), ConfigError);
}

TEST_CASE("format_double is round-trip exact with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(1.0) == "1.0");
    for (double v : {1.0 / 3.0, -1e-300, 6.02214076e23, 0.0}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("verify exit codes") {
    std::ostringstream out;
    std::ostringstream err;
    Settings s = quick(scratch("verify-codes"));
    s.checks = {"no-such-check"};
    CHECK(cmd_verify(s, out, err) == 2);

    s.checks = {"gamma-linear", "gamma-closed-form"};
    CHECK(cmd_verify(s, out, err) == 0);
    CHECK(fs::exists(s.output_dir / "verify.jsonl"));

    // A threshold nothing can meet: the check runs, reports and fails.
    s.checks = {"isometry"};
    s.z_max = -1.0;
    CHECK(cmd_verify(s, out, err) == 1);

    // Tiny runs still emit reports.
    s.z_max = 4.0;
    s.n_paths = 10;
    const int code = cmd_verify(s, out, err);
    CHECK((code == 0 || code == 1));
    CHECK(!slurp(s.output_dir / "verify.jsonl").empty());

    CHECK_EQ(check_names().size(), 11);
}

TEST_CASE("simulate: determinism and empty horizon") {
    std::ostringstream out;
    std::ostringstream err;
    Settings a = quick(scratch("simulate-a"));
    Settings b = quick(scratch("simulate-b"));
    a.n_paths = b.n_paths = 50;
    REQUIRE(cmd_simulate(a, out, err) == 0);
    REQUIRE(cmd_simulate(b, out, err) == 0);
    for (const char* file : {"paths.csv", "functionals.csv"}) {
        CHECK(slurp(a.output_dir / file) == slurp(b.output_dir / file));
    }
    CHECK(slurp(a.output_dir / "paths.csv").rfind("path_id,time,size,mark\n", 0) == 0);
    CHECK(slurp(a.output_dir / "functionals.csv").rfind("path_id,V,Gamma_V,sharp_sample\n", 0) == 0);

    Settings zero = quick(scratch("simulate-zero"));
    zero.horizon = 0.0;
    zero.n_paths = 100;
    REQUIRE(cmd_simulate(zero, out, err) == 0);
    CHECK(slurp(zero.output_dir / "paths.csv") == "path_id,time,size,mark\n");

    Settings unwritable = quick(scratch("simulate-bad"));
    std::ofstream(unwritable.output_dir / "blocker") << "x";
    unwritable.output_dir = unwritable.output_dir / "blocker" / "sub";
    CHECK(cmd_simulate(unwritable, out, err) == 2);
}

TEST_CASE("density command") {
    std::ostringstream err;
    Settings s = quick(scratch("density"));
    s.n_paths = 2000;
    s.phi_name = "shifted-sigmoid";
    std::ostringstream pos;
    REQUIRE(cmd_density(s, pos, err) == 0);
    CHECK(pos.str().find("positivity fraction of Gamma[V]: 1.0\n") != std::string::npos);
    CHECK(fs::exists(s.output_dir / "density.csv"));
    CHECK(fs::exists(s.output_dir / "histogram.csv"));

    s.phi_name = "zero";
    std::ostringstream zero;
    REQUIRE(cmd_density(s, zero, err) == 0);
    CHECK(zero.str().find("positivity fraction of Gamma[V]: 0.0\n") != std::string::npos);

    s.bins = 0;
    std::ostringstream none;
    CHECK(cmd_density(s, none, err) == 2);
}
