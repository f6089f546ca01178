#pragma once

#include <functional>

#include <Eigen/Dense>

namespace cyl {

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double h_init = 0.0;  // 0: pick from the interval length
    long max_steps = 200000;
};

// Adaptive Dormand-Prince 5(4) from t0 to t1 (either direction).
// Throws NumericalFailure on step-size underflow or step budget exhaustion.
Eigen::VectorXd integrate_dp45(const OdeRhs& f, Eigen::VectorXd y, double t0, double t1,
                               const OdeOptions& opt = {});

}  // namespace cyl
