#include "cyl/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cyl/constants.hpp"
#include "cyl/path.hpp"

namespace cyl {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw InvalidParameter("config key '" + key + "': not a number: " + v);
    }
    if (pos != v.size()) throw InvalidParameter("config key '" + key + "': trailing characters in " + v);
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw InvalidParameter("config key '" + key + "': expected an integer");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidParameter("config key '" + key + "': expected a boolean");
}

std::vector<std::string> split(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split(v)) out.push_back(to_double(key, s));
    return out;
}

// "1-5,8" style check lists
std::vector<int> to_checks(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split(v)) {
        const auto dash = s.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int a = to_int(key, trim(s.substr(0, dash))), b = to_int(key, trim(s.substr(dash + 1)));
            for (int i = a; i <= b; ++i) out.push_back(i);
        } else {
            out.push_back(to_int(key, s));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
}

bool positive(const std::vector<double>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

}  // namespace

void RunConfig::validate() const {
    if (!exponents_admissible(alpha, omega))
        throw InvalidParameter("config: exponents need 1 > omega > alpha > 1/2 and 2 + 2 alpha - 4 omega > 0");
    if (!(b > 1.0 && b < omega / alpha)) throw InvalidParameter("config: b must lie in (1, omega/alpha)");
    if (!(delta > 0.0 && delta < pi / 4)) throw InvalidParameter("config: delta must lie in (0, pi/4)");
    if (!(epsilon > 0.0 && std::pow(epsilon, alpha) < delta / 4))
        throw InvalidParameter("config: epsilon must satisfy eps^alpha < delta/4");
    if (fit_epsilons.size() < 2 || !positive(fit_epsilons)) throw InvalidParameter("config: fit_epsilons needs >= 2 positive values");
    if (!(fit_lambda >= 0.0 && fit_lambda <= 1.0)) throw InvalidParameter("config: fit_lambda must lie in [0, 1]");
    if (path_points < 6) throw InvalidParameter("config: path_points must be >= 6");
    if (!bracket_grid.empty() && !positive(bracket_grid)) throw InvalidParameter("config: bracket_grid must be positive");
    if (!positive(slope_t) || !positive(monotonicity_grid) || !positive(identity_t) || !positive(green_t) ||
        !positive(parametrix_t) || !positive(cnc_h) || !positive(gauge_h))
        throw InvalidParameter("config: grids must be non-empty and positive");
    for (double t : green_t)
        if (!(t < flat_delta / 4 && t < football_ball() / 4))
            throw InvalidParameter("config: green_t values must stay below a quarter of both ball radii");
    if (!(identity_h > 0.0)) throw InvalidParameter("config: identity_h must be positive");
    if (harmonic_cutoff < 1 || radial_nodes < 8) throw InvalidParameter("config: Green resolution too small");
    if (!(tol_scale > 0.0)) throw InvalidParameter("config: tol_scale must be positive");
    if (threads < 1) throw InvalidParameter("config: threads must be >= 1");
    for (int c : checks)
        if (c < 1 || c > 12) throw InvalidParameter("config: checks must lie in 1..12");
}

bool RunConfig::enabled(int check) const { return std::find(checks.begin(), checks.end(), check) != checks.end(); }

std::vector<double> RunConfig::bracket_points() const {
    if (!bracket_grid.empty()) return bracket_grid;
    std::vector<double> g;
    for (int i = 0; i < 15; ++i) g.push_back(0.1 * std::pow(1e4, i / 14.0));
    return g;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::string ch;
    for (std::size_t i = 0; i < checks.size(); ++i) ch += (i ? "," : "") + std::to_string(checks[i]);
    return {{"scenario", scenario},
            {"delta", num(delta)},
            {"alpha", num(alpha)},
            {"omega", num(omega)},
            {"b", num(b)},
            {"epsilon", num(epsilon)},
            {"fit_epsilons", join(fit_epsilons)},
            {"fit_lambda", num(fit_lambda)},
            {"path_points", std::to_string(path_points)},
            {"calibrate", calibrate ? "true" : "false"},
            {"bracket_grid", join(bracket_points())},
            {"slope_t", join(slope_t)},
            {"monotonicity_grid", join(monotonicity_grid)},
            {"identity_t", join(identity_t)},
            {"identity_h", num(identity_h)},
            {"flat_delta", num(flat_delta)},
            {"green_t", join(green_t)},
            {"parametrix_t", join(parametrix_t)},
            {"harmonic_cutoff", std::to_string(harmonic_cutoff)},
            {"radial_nodes", std::to_string(radial_nodes)},
            {"cnc_h", join(cnc_h)},
            {"gauge_h", join(gauge_h)},
            {"tol_scale", num(tol_scale)},
            {"seed", std::to_string(seed)},
            {"threads", std::to_string(threads)},
            {"out_dir", out_dir},
            {"checks", ch}};
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter(fmt::format("config line {}: expected key = value", lineno));
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k == "scenario") c.scenario = v;
        else if (k == "delta") c.delta = to_double(k, v);
        else if (k == "alpha") c.alpha = to_double(k, v);
        else if (k == "omega") c.omega = to_double(k, v);
        else if (k == "b") c.b = to_double(k, v);
        else if (k == "epsilon") c.epsilon = to_double(k, v);
        else if (k == "fit_epsilons") c.fit_epsilons = to_list(k, v);
        else if (k == "fit_lambda") c.fit_lambda = to_double(k, v);
        else if (k == "path_points") c.path_points = to_int(k, v);
        else if (k == "calibrate") c.calibrate = to_bool(k, v);
        else if (k == "bracket_grid") c.bracket_grid = to_list(k, v);
        else if (k == "slope_t") c.slope_t = to_list(k, v);
        else if (k == "monotonicity_grid") c.monotonicity_grid = to_list(k, v);
        else if (k == "identity_t") c.identity_t = to_list(k, v);
        else if (k == "identity_h") c.identity_h = to_double(k, v);
        else if (k == "flat_delta") c.flat_delta = to_double(k, v);
        else if (k == "green_t") c.green_t = to_list(k, v);
        else if (k == "parametrix_t") c.parametrix_t = to_list(k, v);
        else if (k == "harmonic_cutoff") c.harmonic_cutoff = to_int(k, v);
        else if (k == "radial_nodes") c.radial_nodes = to_int(k, v);
        else if (k == "cnc_h") c.cnc_h = to_list(k, v);
        else if (k == "gauge_h") c.gauge_h = to_list(k, v);
        else if (k == "tol_scale") c.tol_scale = to_double(k, v);
        else if (k == "seed") c.seed = static_cast<unsigned>(to_int(k, v));
        else if (k == "threads") c.threads = to_int(k, v);
        else if (k == "out_dir") c.out_dir = v;
        else if (k == "checks") c.checks = to_checks(k, v);
        else throw InvalidParameter(fmt::format("config line {}: unknown key '{}'", lineno, k));
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidParameter("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace cyl
