#pragma once

// Independent ground truth. Nothing here shares code with the variational
// pipeline: the phase shift comes from direct integration of the radial
// equation u'' = (2V - k^2) u, and the small-basis cross-check expands every
// determinant by explicit cofactors.

#include "kohnlab/algebra.hpp"
#include "kohnlab/model.hpp"

#include <vector>

namespace kohnlab {

struct OracleResult {
    double eta_exact = 0;  // wrapped to (-pi/2, pi/2]
    double match_radius = 0;
    double step = 0;
    double richardson_error_estimate = 0;
};

// Fixed-step fourth-order integration from u(0) = 0 out to a matching
// radius beyond the potential support, with one Richardson halving for the
// error estimate. Steps are aligned to potential discontinuities. Throws
// std::invalid_argument if match_radius sits inside the potential support.
OracleResult exact_phase_shift(const RadialProblem& problem, double match_radius = 0.0,
                               int n_steps = 20000);

// Closed-form s-wave phase shift of the attractive square well, from
// matching logarithmic derivatives at the edge.
double square_well_phase_shift(double k, double v0, double a);

// First-order (Born) phase shift, tan(eta) = -(2/k) Int V sin^2(kr) dr,
// evaluated by quadrature.
double born_phase_shift(const RadialProblem& problem);

struct BruteForceResult {
    double a = 0, b = 0, c = 0, at = 0;  // determinant quadratic forms by cofactor expansion
    double theta = 0, gamma = 0;
    double gamma_quotient = 0;  // gamma from the (2 at + b) quotient form
    double d = 0;
    double eta_v = 0;       // determinant-only route at the given tau
    double eta_solve = 0;   // explicit-inverse linear-system route
    double a_t = 0;
    std::vector<double> p;
};

// Everything the pipeline computes, re-derived with explicit 1x1..3x3
// cofactor formulas. Only defined for M <= 2; throws std::domain_error
// beyond that.
BruteForceResult brute_force_small_m(const ElementTable& table, double tau);

}  // namespace kohnlab
