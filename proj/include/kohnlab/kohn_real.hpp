#pragma once

// Generalized (real) Kohn solver. Two independent routes to the phase
// shift estimate:
//   * linear-system route: solve A x = -b, evaluate the corrected functional
//   * determinant-only route: tan(eta - tau) = f(tau)/g(tau) from the four
//     extracted coefficients, no solve at all
// plus the analytic slope d(eta)/d(tau) = gamma^2 / (f^2 + g^2), its
// minimization over tau, and the stationary points of det(A; tau).

#include "kohnlab/algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kohnlab {

struct GeneralizedSolution {
    double tau = 0;
    double a_t = 0;               // open-channel coefficient
    std::vector<double> p;        // short-range coefficients
    double i_value = 0;           // stationary functional, reduced form
    double eta_v = 0;             // phase shift estimate, wrapped to (-pi/2, pi/2]
    double eta_unwrapped = 0;     // tau + atan2 branch, continuous in tau
    double det_a = 0;
    double det_a_mod = 0;
    double condition_estimate = 0;
};

GeneralizedSolution solve_generalized(const KohnSystem& system, const ElementTable& table);

// Phase shift straight from the coefficient quadratic forms. Throws
// SingularSystemError when det(A; tau) is numerically zero.
double eta_via_determinants(const DetCoefficients& coeffs, double tau);

// Analytic d(eta)/d(tau); always >= 0. Throws CoefficientError when f and g
// vanish together (only possible on the excluded wavenumber set).
double slope(const DetCoefficients& coeffs, double tau);

enum class Degeneracy {
    None,
    ZeroSlope,      // gamma = 0: eta is independent of tau, nothing to optimize
    ConstantSlope,  // x = y = 0: slope has no extrema, no preferred tau exists
};
std::string to_string(Degeneracy d);

enum class SingularityClass { AnomalyFree, Anomalous, Marginal };
std::string to_string(SingularityClass c);

struct SingularTau {
    double tau = 0;
    double ratio = 0;  // f^2(tau_s) / gamma^2, the anomaly discriminator
    SingularityClass classification = SingularityClass::Marginal;
};

struct TauAnalysis {
    Degeneracy degeneracy = Degeneracy::None;
    double tau0 = 0, tau1 = 0;   // slope minimizer / maximizer in [0, pi)
    double eta0 = 0, eta1 = 0;   // phase shift estimates at tau0, tau1
    double slope_at_tau0 = 0;
    double slope_at_tau1 = 0;
    std::vector<SingularTau> singular_taus;
    bool minimizer_by_third_derivative_agrees = true;
};

// Finds the two extrema of the slope, the phase shifts there, and the
// singular tau values with their anomaly classification. Degenerate
// wavenumbers produce a flagged result without optimizer output.
TauAnalysis optimize_tau(const DetCoefficients& coeffs);

struct StationaryDetResult {
    double tau_d1 = 0, tau_d2 = 0;  // stationary points of det(A; tau), pi/2 apart
    double det_at_d1 = 0, det_at_d2 = 0;
    int singularity_count = 0;  // 0, 1 or 2 zeros of det(A; tau) in [0, pi)
};

class DegenerateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Stationary points of det(A; tau) and the singularity census from the
// extremal signs. Throws DegenerateError when a = c and b = 0 (the
// determinant has no stationary structure).
StationaryDetResult stationary_det_taus(const DetCoefficients& coeffs);

// Phase wrapped into (-pi/2, pi/2].
double wrap_phase(double eta);
// Distance between two phases modulo pi (for comparing wrapped estimates).
double phase_distance(double e1, double e2);

namespace detail {
qreal qwrap_phase(qreal eta);
// eta(tau) with a branch continuous near tau_ref (for finite differencing)
qreal qeta_unwrapped(const QCoeffs& co, qreal tau, qreal theta_ref);
}  // namespace detail

}  // namespace kohnlab
