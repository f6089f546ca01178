#pragma once

#include <string>
#include <vector>

#include "cyl/quadrature.hpp"

namespace cyl {

enum class InteractionKind { U3V, GRAD, U2V2, FCURVE };

InteractionKind parse_interaction_kind(const std::string& s);
std::string to_string(InteractionKind k);

struct InteractionCurves {
    double epsilon = 1.0;
    std::vector<double> t_grid;
    std::vector<double> a, b, c, f;
    std::vector<double> a_err, b_err, c_err, f_err;
};

struct CurvePoint {
    double a, b, c, f;
    double a_err, b_err, c_err, f_err;
    bool converged;
};

QuadratureSpec interaction_default_spec();

// Values at separation ratio tau = t/eps (epsilon normalized to 1).
CurvePoint curve_point(double tau, const QuadratureSpec& spec);

InteractionCurves curves(double epsilon, const std::vector<double>& t_grid, const QuadratureSpec& spec,
                         int threads = 1);

IntegralResult interaction_integral(InteractionKind kind, double epsilon, double t, const QuadratureSpec& spec);
// The mirrored term  int U_+ U_-^3  (equal to U3V by symmetry).
IntegralResult interaction_u1v3(double epsilon, double t, const QuadratureSpec& spec);

// Direct quadrature of the reduced sign-definite derivative integrands.
IntegralResult a_prime_quadrature(double epsilon, double t, const QuadratureSpec& spec);
IntegralResult c_prime_quadrature(double epsilon, double t, const QuadratureSpec& spec);

double default_fd_step(double t);

double verify_b_prime_identity(double epsilon, double t, double h_fd, const QuadratureSpec& spec);

struct MonotonicityRow {
    double t;
    double a_fd, a_quad, a_fd_err, a_quad_err;
    double c_fd, c_quad, c_fd_err, c_quad_err;
    bool ok;
};

struct MonotonicityReport {
    std::vector<MonotonicityRow> rows;
    bool passed = true;
    int first_failure = -1;  // grid index
    std::string message;
};

MonotonicityReport verify_monotonicity(double epsilon, const std::vector<double>& t_grid, const QuadratureSpec& spec,
                                       int threads = 1);

struct SlopeFit {
    double coeff;
    double limit;
    double residual;  // rms of the fit
    std::vector<double> values;
};

SlopeFit asymptotic_slope(InteractionKind kind, double epsilon, const std::vector<double>& t_sequence,
                          const QuadratureSpec& spec, int threads = 1);

}  // namespace cyl
