#include "cyl/ode.hpp"

#include <algorithm>
#include <cmath>

#include "cyl/types.hpp"

namespace cyl {

Eigen::VectorXd integrate_dp45(const OdeRhs& f, Eigen::VectorXd y, double t0, double t1, const OdeOptions& opt) {
    if (t1 == t0) return y;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double h = opt.h_init > 0 ? opt.h_init : span / 16.0;
    double t = t0;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    Eigen::VectorXd k1 = f(t, y);
    long steps = 0;
    while (dir * (t1 - t) > 0) {
        if (++steps > opt.max_steps) throw NumericalFailure("ODE step budget exhausted");
        if (h > std::abs(t1 - t)) h = std::abs(t1 - t);
        if (h < 1e-15 * std::max(1.0, std::abs(t)) * 0.01 + 1e-300 && std::abs(t1 - t) > h)
            throw NumericalFailure("ODE step size underflow (stiff input)");
        const double hs = dir * h;
        const Eigen::VectorXd k2 = f(t + c2 * hs, y + hs * (a21 * k1));
        const Eigen::VectorXd k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::VectorXd yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::VectorXd k7 = f(t + hs, yn);
        const Eigen::VectorXd err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y(i)), std::abs(yn(i)));
            en = std::max(en, std::abs(err(i)) / sc);
        }
        if (!std::isfinite(en)) {
            h *= 0.25;
            continue;
        }
        if (en <= 1.0) {
            t = (std::abs(t1 - t - hs) <= 1e-15 * span) ? t1 : t + hs;
            y = yn;
            k1 = k7;
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-10), -0.2)));
        } else {
            h *= std::max(0.1, 0.9 * std::pow(en, -0.2));
        }
    }
    return y;
}

}  // namespace cyl
