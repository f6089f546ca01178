#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cyl/acceptance.hpp"
#include "cyl/config.hpp"
#include "cyl/constants.hpp"
#include "cyl/reports.hpp"
#include "cyl/types.hpp"
#include "support.hpp"

using namespace cyl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("cyl_test_reports_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig c = parse_config(
        "# comment line\n"
        "scenario = small\n"
        "delta = 0.35   # trailing comment\n"
        "fit_epsilons = 1e-4, 5e-5 ,2.5e-5\n"
        "path_points=11\n"
        "calibrate = yes\n"
        "checks = 1-3,8, 12\n"
        "\n"
        "out_dir = results/run1\n");
    CHECK(c.scenario == "small");
    CHECK(c.delta == 0.35);
    CHECK(c.fit_epsilons == std::vector<double>{1e-4, 5e-5, 2.5e-5});
    CHECK(c.path_points == 11);
    CHECK(c.calibrate);
    CHECK(c.checks == std::vector<int>{1, 2, 3, 8, 12});
    CHECK(c.enabled(2));
    CHECK_FALSE(c.enabled(4));
    CHECK(c.out_dir == "results/run1");
    CHECK(c.alpha == 0.6);

    const RunConfig d = parse_config("");
    CHECK(d.checks.size() == 12);
    CHECK(d.bracket_points().size() == 15);
    CHECK(d.bracket_points().front() == cyltest::Approx(0.1).epsilon(1e-15));
    CHECK(d.bracket_points().back() == cyltest::Approx(1e3).epsilon(1e-15));
}

TEST_CASE("config rejects bad input") {
    CHECK_THROWS_AS(parse_config("unknown_key = 1\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("delta 0.3\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("delta = abc\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("delta = 0.3x\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("path_points = 2.5\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("calibrate = maybe\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("alpha = 0.75\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("b = 1.3\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("delta = 1.0\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("epsilon = 0.1\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("fit_epsilons = 1e-4\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("checks = 0,3\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("checks = 4-13\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("tol_scale = 0\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_config("threads = 0\n"), InvalidParameter);
    CHECK_THROWS_AS(load_config("/nonexistent/cyl.cfg"), InvalidParameter);
}

TEST_CASE("config echo round-trips") {
    RunConfig c = parse_config("delta = 0.35\nfit_lambda = 0.25\ngreen_t = 0.08,0.04\nchecks = 2,5-6\n");
    std::string text;
    for (const auto& [k, v] : c.echo()) text += k + " = " + v + "\n";
    const RunConfig again = parse_config(text);
    CHECK(again.echo() == c.echo());
    CHECK(again.delta == c.delta);
    CHECK(again.green_t == c.green_t);
    CHECK(again.checks == c.checks);
    CHECK(c.echo().front().first == "scenario");
    CHECK(c.echo().back().first == "checks");
}

TEST_CASE("tolerance scaling") {
    const RunConfig c = parse_config("tol_scale = 10\n");
    QuadratureSpec s;
    s.rel_tol = 1e-8;
    s.abs_tol = 1e-10;
    const QuadratureSpec t = c.tuned(s);
    CHECK(t.rel_tol == cyltest::Approx(1e-7).epsilon(1e-14));
    CHECK(t.abs_tol == cyltest::Approx(1e-9).epsilon(1e-14));
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-300) == "-2.5e-300");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-1.0 / 0.0) == "-inf");
    for (double x : {constants().c4, constants().S4, 1.0 / 3.0, 6.02214076e23, 5e-324}) {
        const std::string s = format_number(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
        CHECK(s.find(',') == std::string::npos);
    }
}

TEST_CASE("tables") {
    Table t{"demo", {"name", "n", "x"}, {}};
    t.add({std::string("plain"), 3L, 0.5});
    t.add({std::string("a,b \"q\""), -1L, 1.0 / 3.0});
    CHECK_THROWS_AS(t.add({1.0}), InvalidParameter);
    CHECK(t.csv() ==
          "name,n,x\n"
          "plain,3,0.5\n"
          "\"a,b \"\"q\"\"\",-1,0.33333333333333331\n");
    const auto j = t.json();
    CHECK(j["table"] == "demo");
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][1]["name"] == "a,b \"q\"");
    CHECK(j["rows"][1]["x"].get<double>() == 1.0 / 3.0);
    CHECK(j["rows"][0]["n"].get<long>() == 3);

    const fs::path dir = scratch_dir("tables");
    write_table(t, dir);
    const std::string first = slurp(dir / "demo.csv");
    CHECK(first == t.csv());
    CHECK(nlohmann::json::parse(slurp(dir / "demo.json"))["rows"][0]["name"] == "plain");
    write_table(t, dir);
    CHECK(slurp(dir / "demo.csv") == first);

    write_plot_data(dir / "sub" / "p.dat", {0.0, 1.0}, {2.0, 3.0}, {0.0, 0.125});
    CHECK(slurp(dir / "sub" / "p.dat") == "# x y yerr\n0 2 0\n1 3 0.125\n");
    CHECK_THROWS_AS(write_plot_data(dir / "q.dat", {0.0}, {}, {}), InvalidParameter);
    fs::remove_all(dir);
}

TEST_CASE("manifest") {
    const RunConfig c = parse_config("scenario = manifest-test\n");
    Manifest m(c);
    m.stage("solve", 1.5);
    m.result("max_Q", 61.5, 1e-9);
    m.note("route", "chart");
    const auto j = m.json();
    CHECK(j["library_version"] == library_version);
    CHECK(j["config"]["scenario"] == "manifest-test");
    CHECK(j["constants"]["S4"].get<double>() == constants().S4);
    CHECK(j["stages"][0]["stage"] == "solve");
    CHECK(j["results"]["max_Q"]["error"].get<double>() == 1e-9);
    CHECK(j["notes"]["route"] == "chart");

    const fs::path dir = scratch_dir("manifest");
    m.write(dir);
    CHECK(nlohmann::json::parse(slurp(dir / "manifest.json")) == nlohmann::json::parse(j.dump()));
    fs::remove_all(dir);
}

TEST_CASE("output directory resolution") {
    RunConfig c;
    ::unsetenv("CYL_OUT_DIR");
    CHECK(resolve_out_dir("", c) == fs::path("cyl_out"));
    c.out_dir = "from_config";
    CHECK(resolve_out_dir("", c) == fs::path("from_config"));
    ::setenv("CYL_OUT_DIR", "from_env", 1);
    CHECK(resolve_out_dir("", c) == fs::path("from_env"));
    CHECK(resolve_out_dir("from_flag", c) == fs::path("from_flag"));
    ::setenv("CYL_OUT_DIR", "", 1);
    CHECK(resolve_out_dir("", c) == fs::path("from_config"));
    ::unsetenv("CYL_OUT_DIR");
}

TEST_CASE("acceptance bookkeeping") {
    std::vector<CheckResult> rs(3);
    for (int i = 0; i < 3; ++i) {
        rs[i].index = i + 1;
        rs[i].name = check_name(i + 1);
        rs[i].passed = true;
    }
    CHECK(exit_code(rs) == 0);
    rs[2].passed = false;
    rs[1].passed = false;
    CHECK(exit_code(rs) == 2);
    CHECK(format_check(rs[0]).rfind("PASS", 0) == 0);
    CHECK(format_check(rs[1]).rfind("FAIL", 0) == 0);
    for (int i = 1; i <= acceptance_count; ++i) CHECK_FALSE(check_name(i).empty());

    const CheckResult r = run_check(1, RunConfig{});
    CHECK(r.index == 1);
    CHECK(r.passed);
}
