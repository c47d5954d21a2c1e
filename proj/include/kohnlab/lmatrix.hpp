#pragma once

// Traditional open/closed partitioned formalism: the short-range block is
// diagonalized once per wavenumber, its eigenpairs folded into a 2x2 matrix
// over the open-channel functions, and the phase shift read off that. This
// route deliberately passes through the intermediate poles at E = E_f so
// their cancellation can be tested, and it supplies the correspondence
// between the folded matrix and the determinant coefficients.

#include "kohnlab/algebra.hpp"

#include <array>
#include <memory>
#include <vector>

namespace kohnlab {

namespace detail {
// quad-precision engine kept alive behind the public snapshot: pole sums
// lose all relative accuracy if refolded from rounded couplings
struct QL {
    std::vector<qreal> mu, sd, cd;  // closed-block eigenvalues and couplings
    qreal f_product = 1;
    QTable table;

    explicit QL(const ElementTable& t);
    std::array<qreal, 4> fold(qreal tau) const;  // {L11, L12, L21, L22} at tau
};
}  // namespace detail

struct LDecomposition {
    std::vector<double> e_f;         // E_f = mu_f + E
    std::vector<double> mu;          // raw closed-block eigenvalues (E_f - E)
    std::vector<double> s_coupling;  // <S, chi^D_f>
    std::vector<double> c_coupling;  // <C, chi^D_f>
    std::array<double, 4> l{};       // folded 2x2 at tau = 0: L11 L12 L21 L22
    double f_product = 0;            // prod(E_f - E) = det(closed block)
    double det_l = 0;                // L11 L22 - L12 L21, tau-invariant
    double k = 0;
    double energy = 0;
    double wronskian = 0;
    std::vector<int> pole_flags;     // indices f with |E_f - E| < eps_pole
    double eps_pole = 0;

    double l11() const { return l[0]; }
    double l12() const { return l[1]; }
    double l21() const { return l[2]; }
    double l22() const { return l[3]; }

    std::shared_ptr<const detail::QL> engine;
};

// Symmetric eigen-decomposition of the closed block and the folded 2x2
// matrix. Pole proximity (|E_f - E| < 1e-6 * max|E_f|) is flagged, never
// fatal.
LDecomposition decompose(const ElementTable& table);

// Phase shift from the folded matrix:
// tan(eta - tau) = -L21(tau)/L22(tau) - det(L)/(wronskian * L22(tau)).
// Throws SingularSystemError when L22(tau) vanishes (the same tau that
// makes det(A) = 0).
double eta_via_L(const LDecomposition& dec, double tau);

struct CorrespondenceReport {
    // relative residuals between determinant coefficients and F * L forms
    double a_defect = 0;     // a  vs F * L11
    double c_defect = 0;     // c  vs F * L22
    double b_defect = 0;     // b  vs -F * (L12 + L21)
    double at_defect = 0;    // at vs F * L12
    double wron_defect = 0;  // 2 at + b vs F * wronskian
    double gamma_defect = 0; // gamma vs F * det(L) / wronskian
    double max_defect = 0;
    bool pole_proximate = false;
};

CorrespondenceReport correspondence_check(const LDecomposition& dec,
                                          const DetCoefficients& coeffs);

}  // namespace kohnlab
