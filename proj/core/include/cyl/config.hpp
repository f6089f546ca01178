#pragma once

#include <map>
#include <string>
#include <vector>

#include "cyl/quadrature.hpp"

namespace cyl {

// Flat key = value configuration; '#' starts a comment, lists are comma separated.
struct RunConfig {
    std::string scenario = "default";

    // football and exponents
    double delta = 0.4;
    double alpha = 0.6;
    double omega = 0.7;
    double b = 1.1;

    // path and expansion fits
    double epsilon = 2e-4;
    std::vector<double> fit_epsilons{4e-4, 2e-4, 1e-4, 5e-5};
    double fit_lambda = 0.5;
    int path_points = 51;
    bool calibrate = false;

    // interaction lab (epsilon normalized to 1)
    std::vector<double> bracket_grid;  // empty: 15 geometric points in [0.1, 1000]
    std::vector<double> slope_t{10, 20, 40, 80, 160};
    std::vector<double> monotonicity_grid{0.25, 0.5, 1, 2, 4, 8};
    std::vector<double> identity_t{0.5, 2};
    double identity_h = 1e-3;

    // Green solver
    double flat_delta = 1.0;
    std::vector<double> green_t{0.16, 0.08, 0.04, 0.02};
    std::vector<double> parametrix_t{0.16, 0.08, 0.04, 0.02};
    int harmonic_cutoff = 32;
    int radial_nodes = 40;

    // geometry checks
    std::vector<double> cnc_h{4e-3, 2e-3, 1e-3};
    std::vector<double> gauge_h{1e-2, 5e-3, 2.5e-3};

    double tol_scale = 1.0;  // multiplies every quadrature tolerance
    unsigned seed = 7;
    int threads = 1;
    std::string out_dir;
    std::vector<int> checks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};

    void validate() const;
    // Ball radius of the lifted football chart used by the Green sweeps.
    double football_ball() const { return 2.0 * delta; }
    QuadratureSpec tuned(const QuadratureSpec& base) const { return base.scaled(tol_scale); }
    bool enabled(int check) const;
    std::vector<double> bracket_points() const;
    // Canonical key = value echo, in schema order.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace cyl
