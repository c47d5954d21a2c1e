#pragma once

// Small dense linear algebra over qreal / qcomplex: pivoted LU with exact
// sign tracking, solves, inverse, and a Jacobi eigensolver for symmetric
// matrices. Matrix dimensions here are M+1 with M <= a few dozen, so
// simplicity and accuracy win over blocking.

#include "kohnlab/highprec.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kohnlab {

template <class T>
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

using QMat = Mat<qreal>;
using QCMat = Mat<qcomplex>;

// In-place LU factorization with partial pivoting. Returns the determinant
// (product of pivots times the pivot-permutation parity). A zero pivot makes
// the determinant exactly zero; the column is already eliminated in that
// case, so the factorization stays well defined and the permutation
// complete. Callers decide what "numerically singular" means for their own
// scale.
template <class T>
T lu_factor(Mat<T>& a, std::vector<std::size_t>& perm) {
    const std::size_t n = a.rows();
    perm.resize(n);
    T det = T(1);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t p = j;
        qreal best = pivot_mag(a(j, j));
        for (std::size_t i = j + 1; i < n; ++i) {
            const qreal m = pivot_mag(a(i, j));
            if (m > best) {
                best = m;
                p = i;
            }
        }
        perm[j] = p;
        if (p != j) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(j, c), a(p, c));
            det = -det;
        }
        const T piv = a(j, j);
        det = det * piv;
        if (best == qreal(0)) continue;
        for (std::size_t i = j + 1; i < n; ++i) {
            const T f = a(i, j) / piv;
            a(i, j) = f;
            for (std::size_t c = j + 1; c < n; ++c) a(i, c) = a(i, c) - f * a(j, c);
        }
    }
    return det;
}

template <class T>
void lu_apply(const Mat<T>& lu, const std::vector<std::size_t>& perm, std::vector<T>& x) {
    const std::size_t n = lu.rows();
    for (std::size_t j = 0; j < n; ++j)
        if (perm[j] != j) std::swap(x[j], x[perm[j]]);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] = x[i] - lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] = x[i] - lu(i, j) * x[j];
        x[i] = x[i] / lu(i, i);
    }
}

template <class T>
T determinant(Mat<T> a) {
    std::vector<std::size_t> perm;
    return lu_factor(a, perm);
}

// Solves a x = b; also reports det(a). Throws only on a hard zero pivot.
template <class T>
std::vector<T> solve(Mat<T> a, std::vector<T> b, T* det_out = nullptr) {
    std::vector<std::size_t> perm;
    const T det = lu_factor(a, perm);
    if (det_out) *det_out = det;
    for (std::size_t j = 0; j < a.rows(); ++j)
        if (pivot_mag(a(j, j)) == qreal(0))
            throw std::runtime_error("dense: exactly singular matrix in solve");
    lu_apply(a, perm, b);
    return b;
}

template <class T>
qreal frobenius_norm(const Mat<T>& a) {
    qreal s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const qreal m = qabs(a(i, j));
            s += m * m;
        }
    return qsqrt(s);
}

// Frobenius condition estimate ||A||_F * ||A^-1||_F via explicit inverse;
// fine at these dimensions.
template <class T>
qreal condition_estimate(const Mat<T>& a) {
    const std::size_t n = a.rows();
    Mat<T> lu = a;
    std::vector<std::size_t> perm;
    lu_factor(lu, perm);
    for (std::size_t j = 0; j < n; ++j)
        if (pivot_mag(lu(j, j)) == qreal(0)) return qreal(1) / qreal(0);  // inf
    qreal inv_norm2 = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<T> e(n, T(0));
        e[c] = T(1);
        lu_apply(lu, perm, e);
        for (const auto& v : e) {
            const qreal m = qabs(v);
            inv_norm2 += m * m;
        }
    }
    return frobenius_norm(a) * qsqrt(inv_norm2);
}

// Cyclic Jacobi for symmetric matrices: a = v diag(w) v^T with v orthogonal.
// Rotations are applied until all off-diagonal mass is below eps * scale.
inline void jacobi_eigensym(QMat a, std::vector<qreal>& w, QMat& v) {
    const std::size_t n = a.rows();
    v = QMat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v(i, j) = (i == j) ? 1 : 0;
    if (n == 0) {
        w.clear();
        return;
    }
    const qreal eps = 1e-34Q;
    qreal scale = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = qmax(scale, qabs(a(i, j)));
    if (scale == 0) scale = 1;

    for (int sweep = 0; sweep < 100; ++sweep) {
        qreal off = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off = qmax(off, qabs(a(i, j)));
        if (off <= eps * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const qreal apq = a(p, q);
                if (qabs(apq) <= eps * scale * 1e-4Q) continue;
                const qreal theta = (a(q, q) - a(p, p)) / (2 * apq);
                qreal t = qabs(theta) > 1e17Q
                              ? 1 / (2 * theta)
                              : (theta >= 0 ? 1 / (theta + qsqrt(1 + theta * theta))
                                            : 1 / (theta - qsqrt(1 + theta * theta)));
                const qreal c = 1 / qsqrt(1 + t * t);
                const qreal s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const qreal akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const qreal apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const qreal vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = a(i, i);
    // ascending eigenvalue order, columns of v permuted alongside
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (w[j] < w[m]) m = j;
        if (m != i) {
            std::swap(w[i], w[m]);
            for (std::size_t k = 0; k < n; ++k) std::swap(v(k, i), v(k, m));
        }
    }
}

}  // namespace kohnlab
