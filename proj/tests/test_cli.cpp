#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "roughflow/io.hpp"

using namespace roughflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("roughflow_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const auto p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Run {
    int code;
    std::string log, err;
};

Run run(cli::Invocation inv) {
    std::ostringstream log, err;
    inv.quiet = false;
    const int code = cli::run(inv, log, err);
    return {code, log.str(), err.str()};
}

json report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }

}  // namespace

TEST_CASE("check-field on a non-conforming sink is a successful diagnosis") {
    const auto dir = scratch("check");
    cli::Invocation inv{.subcommand = "check-field", .out = dir / "out"};
    const auto r = run(inv);
    REQUIRE(r.code == cli::kOk);
    const auto rep = report(dir / "out");
    CHECK(rep["verdict"] == "non-conforming");
    CHECK(rep["status"] == "ok");
    CHECK(rep["config"]["field"]["kind"] == "attracting_sink");
    CHECK(rep["results"]["div_growth"].get<double>() > 1.5);
}

TEST_CASE("config validation rejects bad input before writing") {
    const auto dir = scratch("invalid");
    const json bad[] = {{{"grdi", 64}}, {{"dt", 0}}, {{"dt", -1.0}}, {{"grid", 48}}, {{"T", "long"}},
                        {{"initial", "zigzag"}}, {{"mode", "sideways"}}};
    for (const auto& j : bad) {
        CAPTURE(j.dump());
        fs::remove_all(dir / "out");
        const auto r = run({.subcommand = "solve", .config = write_config(dir, j), .out = dir / "out"});
        CHECK(r.code == cli::kInvalidConfig);
        CHECK_FALSE(fs::exists(dir / "out"));
        CHECK(r.err.find(j.begin().key()) != std::string::npos);
    }
    CHECK(run({.subcommand = "bogus", .out = dir / "out"}).code == cli::kInvalidConfig);
    CHECK(run({.subcommand = "osgood", .out = dir / "out", .grid = 64}).code == cli::kInvalidConfig);
    std::ofstream(dir / "broken.json") << "{\"grid\": ";
    CHECK(run({.subcommand = "solve", .config = dir / "broken.json", .out = dir / "out"}).code == cli::kInvalidConfig);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("reports are byte-identical across runs") {
    const auto dir = scratch("repro");
    const auto cfg = write_config(dir, {{"grid", 32}, {"T", 0.25}, {"field", {{"kind", "singular_vortex"}}}});
    for (const char* sub : {"solve", "cascade"}) {
        CAPTURE(sub);
        const auto a = run({.subcommand = sub, .config = cfg, .out = dir / "a", .seed = 7});
        const auto b = run({.subcommand = sub, .config = cfg, .out = dir / "b", .seed = 7});
        REQUIRE(a.code == b.code);
        for (const auto& e : fs::directory_iterator(dir / "a"))
            CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
    }
}

TEST_CASE("config echo carries resolved defaults") {
    const auto dir = scratch("echo");
    const auto r = run({.subcommand = "solve", .config = write_config(dir, {{"grid", 16}, {"T", 0.1}}), .out = dir / "out", .seed = 3});
    REQUIRE(r.code == cli::kOk);
    const auto rep = report(dir / "out");
    const auto& c = rep["config"];
    CHECK(c["grid"] == 16);
    CHECK(c["T"] == 0.1);
    CHECK(c["seed"] == 3);
    CHECK(c["interp"] == "linear");
    CHECK(c["mode"] == "classical");
    CHECK(c["dt"].is_null());
    CHECK(c["field"]["kind"] == "bv_shear");
    CHECK_FALSE(c.contains("out"));
    CHECK(rep["versions"]["container"] == kContainerVersion);
    for (const auto& name : rep["artifacts"]) CHECK(fs::exists(dir / "out" / name.get<std::string>()));

    const auto traj = read_container(dir / "out" / "trajectory.bin");
    CHECK(traj.points_per_axis == 16);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(0.1));
}

TEST_CASE("output directory resolution") {
    const auto dir = scratch("outdir");
    const auto cfg = write_config(dir, {{"K_list", {1, 2, 4}}, {"out", (dir / "from_config").string()}});
    REQUIRE(run({.subcommand = "lacunary", .config = cfg}).code == cli::kOk);
    CHECK(fs::exists(dir / "from_config" / "report.json"));

    ::setenv(cli::kOutputDirEnv, (dir / "from_env").c_str(), 1);
    REQUIRE(run({.subcommand = "lacunary", .config = cfg}).code == cli::kOk);
    CHECK(fs::exists(dir / "from_env" / "lacunary.csv"));
    REQUIRE(run({.subcommand = "lacunary", .config = cfg, .out = dir / "from_flag"}).code == cli::kOk);
    CHECK(fs::exists(dir / "from_flag" / "report.json"));
    ::unsetenv(cli::kOutputDirEnv);
}

TEST_CASE("negative verdicts and --allow-partial") {
    const auto dir = scratch("partial");
    const auto cfg = write_config(dir, {{"grid", 32}, {"gap_threshold", 1e-12}});
    const auto strict = run({.subcommand = "cascade", .config = cfg, .out = dir / "a"});
    CHECK(strict.code == cli::kNotConverged);
    CHECK(report(dir / "a")["status"] == "failed");
    const auto lax = run({.subcommand = "cascade", .config = cfg, .out = dir / "b", .allow_partial = true});
    CHECK(lax.code == cli::kOk);
    CHECK(report(dir / "b")["status"] == "partial");
    CHECK(report(dir / "b")["verdict"] == "not converged");
}

TEST_CASE("guard violations surface with their own exit code") {
    const auto dir = scratch("guard");
    const auto cfg = write_config(dir, {{"grid", 16}, {"eps_schedule", {0.01}}});
    const auto r = run({.subcommand = "commutator", .config = cfg, .out = dir / "out"});
    CHECK(r.code == cli::kGuardViolation);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("osgood-lab subcommands") {
    const auto dir = scratch("osgood");
    REQUIRE(run({.subcommand = "osgood", .config = write_config(dir, {{"modulus", {{"kind", "power"}, {"theta", 0.5}}}}), .out = dir / "o"}).code == cli::kOk);
    CHECK(report(dir / "o")["verdict"] == "convergent");
    REQUIRE(run({.subcommand = "weierstrass", .config = write_config(dir, {{"K", 12}}), .out = dir / "w"}).code == cli::kOk);
    CHECK(report(dir / "w")["results"]["c"].get<double>() > 0.0);
    CHECK(fs::exists(dir / "w" / "weierstrass.csv"));
    CHECK(cli::subcommands().size() == 13);
}
