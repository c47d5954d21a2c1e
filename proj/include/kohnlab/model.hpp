#pragma once

// Radial s-wave scattering model: the potential, the free functions
// S(r) = N sin(kr) and C(r) = N cos(kr)(1 - exp(-beta r)), a short-range
// Slater-type basis chi_i(r) = r^{n_i} exp(-alpha_i r), and the table of
// residual integrals <X,(H-E)Y> assembled by composite Gauss-Legendre
// quadrature. All operators act on the reduced radial function, so
// (H-E) = -1/2 d^2/dr^2 + V(r) - k^2/2 in atomic units.

#include <stdexcept>
#include <string>
#include <vector>

namespace kohnlab {

enum class PotentialKind { SquareWell, Exponential, Zero };

struct Potential {
    PotentialKind kind = PotentialKind::SquareWell;
    double v0 = 1.0;  // depth (square well) or strength (exponential); attractive for v0 > 0
    double a = 1.0;   // well radius or exponential range

    double operator()(double r) const;

    // radius beyond which |V| has fallen below `tail` of its peak
    double support_radius(double tail = 1e-12) const;

    // discontinuity positions that quadrature panels and ODE steps must respect
    std::vector<double> breakpoints() const;
};

Potential make_potential(const std::string& kind, double v0, double a);
std::string to_string(PotentialKind kind);

struct RadialProblem {
    Potential potential;
    double k = 0.5;              // wavenumber, k > 0
    double normalization = 1.0;  // N multiplying both free functions
    double beta = 1.5;           // origin cutoff steepness of C; default k + 1
    bool beta_tracks_k = true;   // re-derive beta = k + 1 when k changes in a scan
    double r_max = 40.0;         // quadrature truncation radius
    int n_quad = 512;            // target quadrature point count

    double energy() const { return 0.5 * k * k; }
    double k_tilde() const { return 0.5 * normalization * normalization * k; }

    // throws std::invalid_argument when an invariant fails (k <= 0,
    // potential tail above 1e-12 of peak at r_max, ...)
    void validate() const;
};

// Problem with the documented defaults at wavenumber k (beta = k + 1).
RadialProblem default_problem(double k);

struct BasisSet {
    std::vector<int> powers;        // n_i >= 1
    std::vector<double> exponents;  // alpha_i > 0

    int size() const { return static_cast<int>(powers.size()); }
    void validate() const;  // square-integrability and pairwise-distinct checks

    // default set: n in {1,2,3,4} crossed with alpha in {0.8, 1.6}, M = 8
    static BasisSet default_m8();
};

// All <X,(H-E)Y> integrals among {S, C, chi_1..chi_M} at fixed k.
// Mixed S/C rows are stored once (Hermiticity makes <S,chi> = <chi,S>);
// chi_chi is symmetric exactly as stored. sc and cs differ: their gap is the
// surface term sc - cs = N^2 k / 2.
struct ElementTable {
    double ss = 0, sc = 0, cs = 0, cc = 0;
    std::vector<double> s_chi, c_chi;
    std::vector<double> chi_chi;  // row-major M x M
    double k_tilde = 0;           // analytic N^2 k / 2
    double k = 0;
    int m = 0;
    double antisymmetry_defect = 0;   // |sc - cs - k_tilde| as assembled
    double convergence_estimate = 0;  // worst relative change on the last refinement

    double chi(int i, int j) const { return chi_chi[static_cast<std::size_t>(i) * m + j]; }

    // the operative antisymmetry constant: every phase-shift formula uses
    // this table-consistent value, so the algebraic identities hold exactly
    // for the table as stored
    double wronskian() const { return sc - cs; }
};

class AssemblyError : public std::runtime_error {
  public:
    AssemblyError(const std::string& what, double defect)
        : std::runtime_error(what), defect_(defect) {}
    double defect() const { return defect_; }

  private:
    double defect_;
};

// Assembles the integral table, refining the quadrature (panel doubling, up
// to 3 times) until every entry is stable to 1e-10 relative and the
// antisymmetry defect is below 1e-8 * k_tilde. Throws AssemblyError with the
// defect magnitude when the refinement cap is hit.
ElementTable assemble_elements(const RadialProblem& problem, const BasisSet& basis);

// Composite Gauss-Legendre rule on [0, r_max] split at the potential's
// breakpoints; exposed for the quadrature-backed oracles in the test suites.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule build_rule(const RadialProblem& problem, int n_target);

}  // namespace kohnlab
