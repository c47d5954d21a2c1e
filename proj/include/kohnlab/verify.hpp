#pragma once

// Named verification suites: each one measures a family of identities over
// a wavenumber grid and compares the worst residual against a pinned
// tolerance. The acceptance gate and the `verify` subcommand both drive
// these; the tolerances live here so they are code, not configuration.

#include "kohnlab/model.hpp"

#include <string>
#include <vector>

namespace kohnlab {

struct VerifyOptions {
    RadialProblem problem_template;      // k is overridden per grid point
    BasisSet basis = BasisSet::default_m8();
    std::vector<double> k_grid;          // empty = 0.1 .. 1.0 in 10 steps
    unsigned seed = 0x6b6f686e;

    // pinned tolerances
    double tol_antisymmetry = 1e-8;    // relative to the analytic constant
    double tol_theta_spread = 1e-9;    // relative spread over tau samples
    double tol_gamma_sq = 1e-8;        // relative defect of the invariant product
    double tol_desnanot = 1e-12;       // absolute residual, unit-scale matrices
    double tol_route = 1e-9;           // absolute phase gap between routes
    double tol_slope_fd = 1e-6;        // relative, against finite differences
    double tol_tau_separation = 1e-12; // |tau1 - tau0 - pi/2|
    double tol_eta_separation = 1e-9;  // extremal phase shifts, mod pi
    double tol_extremal_value = 1e-9;  // stationary-value formula vs det route
    double tol_flatness = 1e-10;       // complex estimate over the tau grid
    double tol_circle = 1e-10;         // |det(A')| radius, relative
    double tol_re_match = 1e-10;       // Re[eta'] vs eta0
    double tol_im_formula = 1e-9;      // Im[eta'] vs atanh(slope)
    double tol_variant = 1e-9;         // open-channel form relations
    double tol_tan_forms = 1e-8;       // closed forms of the mixed tangent
    double tol_lmatrix = 1e-8;         // correspondence residuals
    double tol_det_l = 1e-10;          // det(L) tau-invariance, relative
    double tol_oracle = 1e-3;          // variational vs integrated phase shift
    double tol_oracle_analytic = 1e-8; // integrator vs closed-form square well

    std::vector<double> grid() const;
};

struct SuiteResult {
    std::string name;
    enum class Status { Pass, Fail, Skip } status = Status::Pass;
    double worst = 0;       // worst residual observed
    double tolerance = 0;
    std::string detail;     // one-line diagnosis

    bool ok() const { return status != Status::Fail; }
};

// registered suite names, in execution order
const std::vector<std::string>& suite_names();

SuiteResult run_suite(const std::string& name, const VerifyOptions& opt);
std::vector<SuiteResult> run_suites(const std::vector<std::string>& names,
                                    const VerifyOptions& opt);

// locates a wavenumber where 2*at + b changes sign (a closed-block
// eigenvalue crossing); used by the pole-cancellation check
double find_coefficient_crossing(const VerifyOptions& opt, double k_lo, double k_hi);

}  // namespace kohnlab
