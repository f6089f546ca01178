#pragma once

#include <string>
#include <vector>

#include "cyl/football.hpp"
#include "cyl/jet.hpp"
#include "cyl/quadrature.hpp"

namespace cyl {

enum class TestVariant { Single, Double, Glued, Interp };

std::string to_string(TestVariant v);
TestVariant parse_test_variant(const std::string& s);

// Test functions on the football. SINGLE and DOUBLE live in the tip chart of
// `pole` (+1: N, -1: S) with bubbles at +-t e1; GLUED is the bubble glued to the
// Green function at q = meridian(s); INTERP mixes DOUBLE at t = eps^alpha with
// GLUED at the same point, lambda being the weight of the glued part.
struct TestFunctionDescriptor {
    TestVariant variant = TestVariant::Single;
    double epsilon = 1e-2;
    double t = 0.0;
    double s = 0.0;
    double tau = 0.0;
    double lambda = 0.0;
    double alpha = 0.6, omega = 0.7;
    double delta = 0.4;  // inf allowed for SINGLE/DOUBLE on the flat chart route
    int pole = 1;
    double amplitude = 1.0;  // overall positive factor; Q does not depend on it

    // GLUED/INTERP: CNC cutoff scale, mass of G_q and matching constant.
    double T = 0.0, A_q = 0.0, nu_match = 0.0;

    void validate() const;
};

TestFunctionDescriptor single_bubble(double epsilon, double delta, int pole = 1);
TestFunctionDescriptor double_bubble(double epsilon, double t, double delta, int pole = 1);
TestFunctionDescriptor glued_bubble(double epsilon, double s, double tau, double delta);
TestFunctionDescriptor interpolated(double epsilon, double lambda, double alpha, double omega, double delta,
                                    int pole = 1);

// 1 > omega > alpha > 1/2 and 2 + 2 alpha - 4 omega > 0.
bool exponents_admissible(double alpha, double omega);

// Lift of the test function to S^4 (invariant under the involution).
double lifted_value(const TestFunctionDescriptor& d, const Vec5& Y);

struct QuotientResult {
    double Q = 0.0, error = 0.0;
    // On M: 6 int |grad u|^2 + int R u^2, and int u^4.
    double numerator = 0.0, denominator = 0.0;
    double numerator_error = 0.0, denominator_error = 0.0;
    bool converged = true;
};

QuadratureSpec path_default_spec();

// Quotient on the football by integration over S^4 and the 1/sqrt2 lift factor.
QuotientResult evaluate_quotient(const TestFunctionDescriptor& d, const QuadratureSpec& spec);
// Quotient from the tip chart of a radial field directly: SINGLE/DOUBLE only,
// integrated over the fundamental domain {y1 > 0} of y -> -y.
QuotientResult evaluate_quotient_chart(const TestFunctionDescriptor& d, FieldPtr field, const QuadratureSpec& spec);

struct NuMatch {
    double nu = 0.0;
    double inverse = 0.0;    // 1/nu
    double expansion = 0.0;  // c4 eps (1 - tau^2 A_q - eps^2/tau^2)
    double gap = 0.0;        // |expansion - 1/nu| / (1/nu)
};
NuMatch nu_matching(double epsilon, double tau, double A_q);

struct BoundaryFlux {
    double closed_form = 0.0;
    double quadrature = 0.0;
    double quadrature_error = 0.0;
};
// int over |z| = tau of (d_r U_eps) U_eps.
BoundaryFlux boundary_flux(double epsilon, double tau, const QuadratureSpec& spec);

// ||u_a - u_b||_4 / ||u_a||_4 on M; the quadrature is centered on a's
// descriptor, so b must concentrate where a does.
double l4_distance(const TestFunctionDescriptor& a, const TestFunctionDescriptor& b, const QuadratureSpec& spec);

struct PathOptions {
    double epsilon = 2e-4;
    double alpha = 0.6, omega = 0.7;
    double delta = 0.4;
    int points = 51;
    int threads = 1;
    QuadratureSpec spec = path_default_spec();
};

// Five legs on mu in [0, 5]; the middle leg runs over the meridian from N to S.
TestFunctionDescriptor path_descriptor(double mu, const PathOptions& opt);

struct PathProfile {
    PathOptions options;
    std::vector<double> mu;
    std::vector<TestFunctionDescriptor> descriptors;
    std::vector<QuotientResult> values;
    double max_Q = 0.0;
    double max_error = 0.0;  // largest error bar on the profile
    int argmax = -1;
    std::vector<double> transition_gaps;  // L4 distance across mu = 1, 2, 3, 4
    double seconds = 0.0;
};

PathProfile build_path(const PathOptions& opt);

enum class FitLeg { Double, Glued, Interp };
std::string to_string(FitLeg l);
FitLeg parse_fit_leg(const std::string& s);

struct ExpansionFit {
    FitLeg leg = FitLeg::Double;
    double lambda = 0.5;
    double alpha = 0.6;
    std::vector<double> epsilon, Q, Q_error;
    double A_hat = 0.0;     // Q = 6 S4 - A eps^{2(1-alpha)}
    double A_error = 0.0;   // from the Q error bars
    double residual = 0.0;  // rms of the fixed-exponent fit
    double exponent = 0.0;  // free fit Q = 6 S4 - C eps^p
    double C_free = 0.0;
};

ExpansionFit fit_expansion_A(FitLeg leg, const std::vector<double>& epsilons, double alpha, double omega, double delta,
                             double lambda, const QuadratureSpec& spec, int threads = 1);

struct Calibration {
    double epsilon = 0.0;
    std::vector<double> epsilons, A_local;
    bool converged = false;
};

// Shrinks epsilon by `ratio` until the local A on the INTERP leg (lambda = 1/2)
// changes by less than rel_tol between steps.
Calibration calibrate_epsilon(double eps_start, double ratio, int max_steps, double rel_tol, double alpha,
                              double omega, double delta, const QuadratureSpec& spec, int threads = 1);

}  // namespace cyl
