#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sevo/commands.hpp"
#include "sevo/config.hpp"
#include "sevo/io.hpp"

using namespace sevo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string json_field(const std::string& json, const std::string& key) {
    size_t pos = json.find("\"" + key + "\"");
    REQUIRE(pos != std::string::npos);
    size_t colon = json.find(':', pos);
    size_t q1 = json.find('"', colon + 1);
    size_t q2 = json.find('"', q1 + 1);
    return json.substr(q1 + 1, q2 - q1 - 1);
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("sevo_test_" + tag);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("config round trip is lossless") {
    RunConfig cfg;
    cfg.scheme = "explicit";
    cfg.family = "fe";
    cfg.n = 16;
    cfg.m = 123;
    cfg.T = 0.75;
    cfg.operators = "example";
    cfg.p = 4.0;
    cfg.sigma = {0.5, 0.25};
    cfg.b = {0.1};
    cfg.seed = 987654321012345ull;
    cfg.gamma = 0.3;
    cfg.deterministic = true;
    cfg.scan_n = {1, 2, 3};
    cfg.ladder_m = {16, 64};
    cfg.tolerance = 1e-9;
    cfg.out_dir = "somewhere/else";

    RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back == cfg);
    CHECK(serialize_config(back) == serialize_config(cfg));
}

TEST_CASE("config errors name the offending key") {
    CHECK_THROWS_WITH_AS(parse_config("[run]\nbogus = 1\n"),
                         doctest::Contains("run.bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nn = seven\n"),
                         doctest::Contains("run.n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[mc]\ndeterministic = maybe\n"),
                         doctest::Contains("mc.deterministic"), ConfigError);
    CHECK_THROWS_AS(parse_config("no_equals_sign\n"), ConfigError);
}

TEST_CASE("config parsing tolerates comments and blank lines") {
    RunConfig cfg = parse_config("# top comment\n\n[run]\n  n = 5\n\n# more\nm = 9\n");
    CHECK(cfg.n == 5);
    CHECK(cfg.m == 9);
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -0.0, 2.0}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hash_hex(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("csv writers: LF endings and row counts") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 2);
    OperatorPair heat = make_linear_heat(1.0, {0.5});
    TimeGrid grid{1.0, 4};
    Vec u0 = project(s, [](double x) { return x * (1.0 - x); });
    Trajectory traj = run_implicit_spacetime(s, grid, heat, u0, Mat::Zero(1, 4));

    std::ostringstream out;
    write_trajectory_csv(out, traj);
    std::string csv = out.str();
    CHECK(csv.find('\r') == std::string::npos);
    long rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == 1 + 5);  // header + m + 1 nodes
    CHECK(csv.rfind("step,time,c0,c1,", 0) == 0);
}

TEST_CASE("cmd_simulate: layout, determinism, OUT_DIR override") {
    RunConfig cfg;
    cfg.scheme = "implicit-spacetime";
    cfg.n = 2;
    cfg.m = 6;
    cfg.paths = 3;
    cfg.sigma = {0.5};
    cfg.seed = 11;

    fs::path d1 = fresh_dir("sim1"), d2 = fresh_dir("sim2");
    cfg.out_dir = d1.string();
    REQUIRE(cmd_simulate(cfg).exit_code == 0);
    cfg.out_dir = d2.string();
    REQUIRE(cmd_simulate(cfg).exit_code == 0);

    // One CSV per path, m + 1 data rows each.
    for (int p = 0; p < 3; ++p) {
        char name[48];
        std::snprintf(name, sizeof(name), "trajectory_%04d.csv", p);
        std::string csv = slurp(d1 / name);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 7);
        CHECK(csv == slurp(d2 / name));  // bitwise identical across runs
    }
    std::string h1 = json_field(slurp(d1 / "manifest.json"), "content_hash");
    std::string h2 = json_field(slurp(d2 / "manifest.json"), "content_hash");
    CHECK(h1 == h2);

    // OUT_DIR env override wins over the config directory.
    fs::path d3 = fresh_dir("sim3");
    setenv("OUT_DIR", d3.string().c_str(), 1);
    cfg.out_dir = "should_not_be_used";
    REQUIRE(cmd_simulate(cfg).exit_code == 0);
    unsetenv("OUT_DIR");
    CHECK(fs::exists(d3 / "manifest.json"));
    CHECK_FALSE(fs::exists(fs::path("should_not_be_used")));

    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST_CASE("cmd_simulate rejects bad config with a named key") {
    RunConfig cfg;
    cfg.profile = "triangle";
    cfg.out_dir = fresh_dir("simbad").string();
    CommandResult res = cmd_simulate(cfg);
    CHECK(res.exit_code == 2);
    CHECK(res.error_class == "ConfigError");
    CHECK(res.message.find("initial.profile") != std::string::npos);
}

TEST_CASE("cmd_check_conditions writes the report") {
    RunConfig cfg;
    cfg.n = 4;
    cfg.paths = 200;
    fs::path dir = fresh_dir("cond");
    cfg.out_dir = dir.string();
    CommandResult res = cmd_check_conditions(cfg);
    CHECK(res.exit_code == 0);
    std::string csv = slurp(dir / "conditions.csv");
    CHECK(csv.find("monotonicity") != std::string::npos);
    CHECK(csv.find("coercivity") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cmd_stability_scan and cmd_converge produce artifacts") {
    RunConfig cfg;
    cfg.deterministic = true;
    cfg.scan_n = {1, 2};
    cfg.scan_m = {8, 64};
    cfg.svg = true;
    fs::path dir = fresh_dir("scan");
    cfg.out_dir = dir.string();
    CommandResult res = cmd_stability_scan(cfg);
    CHECK(res.exit_code == 0);
    CHECK(slurp(dir / "scan.csv").rfind("n,m,", 0) == 0);
    CHECK(slurp(dir / "scan.svg").find("<svg") != std::string::npos);
    fs::remove_all(dir);

    RunConfig lcfg;
    lcfg.ladder_n = {2, 2};
    lcfg.ladder_m = {4, 8};
    lcfg.reference = "oracle";
    lcfg.finest_level = 5;
    lcfg.paths = 5;
    lcfg.sigma = {0.5};
    lcfg.svg = true;
    fs::path ldir = fresh_dir("ladder");
    lcfg.out_dir = ldir.string();
    CommandResult lres = cmd_converge(lcfg);
    CHECK(lres.exit_code == 0);
    CHECK(slurp(ldir / "ladder.csv").rfind("n,m,delta,", 0) == 0);
    CHECK(slurp(ldir / "ladder.svg").find("<svg") != std::string::npos);
    CHECK(slurp(ldir / "manifest.json").find("fitted_order") != std::string::npos);
    fs::remove_all(ldir);
}

TEST_CASE("cmd_converge surfaces coupling violations as an error class") {
    RunConfig cfg;
    cfg.scheme = "explicit";
    cfg.ladder_n = {2, 4};
    cfg.ladder_m = {64, 64};  // rho increases: rejected
    cfg.reference = "oracle";
    cfg.finest_level = 6;
    cfg.paths = 2;
    cfg.out_dir = fresh_dir("couple").string();
    CommandResult res = cmd_converge(cfg);
    CHECK(res.exit_code == 5);
    CHECK(res.error_class == "CouplingViolated");
}
