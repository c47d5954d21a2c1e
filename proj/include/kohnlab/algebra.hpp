#pragma once

// tau-rotation of element tables, Kohn linear systems, and the
// tau-independent determinant coefficients that determine the phase shift
// without solving any linear system.
//
// det(A; tau)  = a sin^2(tau) + b sin(tau)cos(tau) + c cos^2(tau)
// det(A~; tau) = at sin^2(tau) + (a - c) sin(tau)cos(tau) + (at + b) cos^2(tau)
//
// where A~ is A with its first column replaced by -b_vec. theta is the
// tau-invariant product det(A) * I[trial] and gamma = theta / wronskian.

#include "kohnlab/dense.hpp"
#include "kohnlab/model.hpp"

#include <stdexcept>
#include <vector>

namespace kohnlab {

struct RotatedTable {
    double tau = 0;
    double ss = 0, sc = 0, cs = 0, cc = 0;
    std::vector<double> s_chi, c_chi;
    const ElementTable* source = nullptr;  // chi block is rotation-invariant
};

// Exact bilinear rotation of the mixed integrals; no re-quadrature.
// Requires 0 <= tau < pi.
RotatedTable rotate(const ElementTable& table, double tau);

struct KohnSystem {
    double tau = 0;
    Mat<double> a;          // (M+1) x (M+1), row/col 0 is the open-channel function
    std::vector<double> b;  // right-hand side, negated in the solve
};

KohnSystem build_kohn_system(const RotatedTable& rt);

struct DetCoefficients {
    double a = 0, b = 0, c = 0;  // det(A; tau) quadratic form
    double at = 0;               // leading coefficient of det(A~; tau)
    double bt = 0, ct = 0;       // remaining A~ coefficients: bt = a - c, ct = at + b
    double theta = 0;            // det(A) * I[trial], tau-invariant
    double gamma = 0;            // theta / wronskian
    double d = 0;                // numerator offset in the determinant-only phase formula
    double x = 0, y = 0;         // slope-extremum form: f f' + g g' = x sin(2 tau) + y cos(2 tau)
    double k = 0;
    double wronskian = 0;
    double scale = 0;  // |a|+|b|+|c|+|at|, the natural size of these determinants

    bool near_wronskian_degeneracy = false;  // |2 at + b| fell below the guard; d from theta route
};

class CoefficientError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SingularSystemError : public std::runtime_error {
  public:
    SingularSystemError(const std::string& what, double det, double cond)
        : std::runtime_error(what), det_(det), cond_(cond) {}
    double det() const { return det_; }
    double condition() const { return cond_; }

  private:
    double det_, cond_;
};

// Extracts (a, b, c, at) from determinant evaluations at tau = 0, pi/4,
// pi/2, theta from one well-conditioned solve, and the derived scalars.
// Throws CoefficientError when the determinant form vanishes identically
// (the measure-zero wavenumber set where no tau yields a usable system).
DetCoefficients extract_det_coefficients(const ElementTable& table);

struct ThetaInvarianceReport {
    double theta_ref = 0;
    double spread = 0;        // max - min over the sampled tau values
    double relative_spread = 0;
    int skipped = 0;          // samples where A was numerically singular
    std::vector<double> samples;
};

// Evaluates det(A; tau) * I[trial; tau] at each tau and reports the spread.
ThetaInvarianceReport theta_invariance_check(const ElementTable& table,
                                             const std::vector<double>& taus);

// Residual of the two-row/two-column minor identity
//   det(X) det(X^{(i,p)}_{(j,q)}) = +/- [det(X^i_j) det(X^p_q) - det(X^p_j) det(X^i_q)]
// for a symmetric matrix X, with the convention that the doubly-reduced
// matrix is zero when i = p or j = q. Indices are 0-based.
double desnanot_jacobi_check(const Mat<double>& x, int i, int j, int p, int q);

namespace detail {

// quad-precision mirror of the element table; every numerically delicate
// path re-derives rotations and factorizations from this
struct QTable {
    qreal ss, sc, cs, cc;
    std::vector<qreal> s_chi, c_chi, chi_chi;
    qreal kw;  // sc - cs
    int m;

    explicit QTable(const ElementTable& t);
    qreal chi(int i, int j) const { return chi_chi[static_cast<std::size_t>(i) * m + j]; }
};

struct QRotated {
    qreal ss, sc, cs, cc;
    std::vector<qreal> s_chi, c_chi;
};

QRotated qrotate(const QTable& t, qreal tau);
QMat qmatrix(const QTable& t, const QRotated& r);           // the (M+1) Kohn matrix
std::vector<qreal> qrhs(const QRotated& r);                 // its right-hand side
qreal qdet(const QTable& t, qreal tau);                     // det(A; tau)
qreal qdet_mod(const QTable& t, qreal tau);                 // det(A~; tau)

struct QSolve {
    qreal a_t;
    std::vector<qreal> p;
    qreal i_value;
    qreal det;
};
QSolve qsolve(const QTable& t, qreal tau);

struct QCoeffs {
    qreal a = 0, b = 0, c = 0, at = 0, theta = 0, gamma = 0, d = 0, x = 0, y = 0, kw = 0,
          scale = 0;
    bool near_wronskian_degeneracy = false;

    qreal f(qreal tau) const;       // det(A~; tau) - gamma
    qreal g(qreal tau) const;       // det(A; tau)
    qreal fprime(qreal tau) const;  // (a - c) cos 2tau - b sin 2tau
    qreal gprime(qreal tau) const;  // (a - c) sin 2tau + b cos 2tau
    qreal slope(qreal tau) const;   // gamma^2 / (f^2 + g^2)
};
QCoeffs qcoeffs(const QTable& t);

// numerically-singular floor: |det| below 1e-12 of the determinant form's
// own scale |a|+|b|+|c|
qreal singular_floor(const QCoeffs& co);

}  // namespace detail

}  // namespace kohnlab
