#include "kohnlab/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace kohnlab {

namespace detail {

QTable::QTable(const ElementTable& t)
    : ss(t.ss), sc(t.sc), cs(t.cs), cc(t.cc), m(t.m) {
    s_chi.assign(t.s_chi.begin(), t.s_chi.end());
    c_chi.assign(t.c_chi.begin(), t.c_chi.end());
    chi_chi.assign(t.chi_chi.begin(), t.chi_chi.end());
    kw = sc - cs;
}

QRotated qrotate(const QTable& t, qreal tau) {
    const qreal c = qcos(tau), s = qsin(tau);
    QRotated r;
    r.ss = c * c * t.ss + c * s * (t.sc + t.cs) + s * s * t.cc;
    r.sc = -s * c * t.ss + c * c * t.sc - s * s * t.cs + s * c * t.cc;
    r.cs = -s * c * t.ss - s * s * t.sc + c * c * t.cs + s * c * t.cc;
    r.cc = s * s * t.ss - s * c * (t.sc + t.cs) + c * c * t.cc;
    r.s_chi.resize(t.m);
    r.c_chi.resize(t.m);
    for (int i = 0; i < t.m; ++i) {
        r.s_chi[i] = c * t.s_chi[i] + s * t.c_chi[i];
        r.c_chi[i] = -s * t.s_chi[i] + c * t.c_chi[i];
    }
    return r;
}

QMat qmatrix(const QTable& t, const QRotated& r) {
    const int m = t.m;
    QMat a(m + 1, m + 1);
    a(0, 0) = r.cc;
    for (int j = 0; j < m; ++j) {
        a(0, j + 1) = r.c_chi[j];
        a(j + 1, 0) = r.c_chi[j];
        for (int i = 0; i < m; ++i) a(i + 1, j + 1) = t.chi(i, j);
    }
    return a;
}

std::vector<qreal> qrhs(const QRotated& r) {
    std::vector<qreal> b(r.s_chi.size() + 1);
    b[0] = r.cs;
    for (std::size_t j = 0; j < r.s_chi.size(); ++j) b[j + 1] = r.s_chi[j];
    return b;
}

qreal qdet(const QTable& t, qreal tau) {
    const QRotated r = qrotate(t, tau);
    return determinant(qmatrix(t, r));
}

qreal qdet_mod(const QTable& t, qreal tau) {
    const QRotated r = qrotate(t, tau);
    QMat a = qmatrix(t, r);
    const std::vector<qreal> b = qrhs(r);
    for (int i = 0; i <= t.m; ++i) a(i, 0) = -b[i];
    return determinant(a);
}

QSolve qsolve(const QTable& t, qreal tau) {
    const QRotated r = qrotate(t, tau);
    QMat a = qmatrix(t, r);
    std::vector<qreal> rhs = qrhs(r);
    for (auto& v : rhs) v = -v;
    QSolve out;
    out.p.resize(t.m);
    std::vector<qreal> x = solve(a, rhs, &out.det);
    out.a_t = x[0];
    for (int i = 0; i < t.m; ++i) out.p[i] = x[i + 1];
    // reduced form of the stationary functional: <S,S> + a_t <S,C> + sum p_j <S,chi_j>
    qreal iv = r.ss + out.a_t * r.sc;
    for (int i = 0; i < t.m; ++i) iv += out.p[i] * r.s_chi[i];
    out.i_value = iv;
    return out;
}

qreal QCoeffs::g(qreal tau) const {
    const qreal s = qsin(tau), co = qcos(tau);
    return a * s * s + b * s * co + c * co * co;
}

qreal QCoeffs::f(qreal tau) const {
    const qreal s = qsin(tau), co = qcos(tau);
    return at * s * s + (a - c) * s * co + (at + b) * co * co - gamma;
}

qreal QCoeffs::fprime(qreal tau) const {
    return (a - c) * qcos(2 * tau) - b * qsin(2 * tau);
}

qreal QCoeffs::gprime(qreal tau) const {
    return (a - c) * qsin(2 * tau) + b * qcos(2 * tau);
}

qreal QCoeffs::slope(qreal tau) const {
    const qreal fv = f(tau), gv = g(tau);
    return gamma * gamma / (fv * fv + gv * gv);
}

QCoeffs qcoeffs(const QTable& t) {
    QCoeffs co;
    co.kw = t.kw;
    // three tau samples pin both quadratic forms
    co.c = qdet(t, 0);
    co.a = qdet(t, QPI / 2);
    co.b = 2 * qdet(t, QPI / 4) - co.a - co.c;
    co.at = qdet_mod(t, QPI / 2);
    co.scale = qabs(co.a) + qabs(co.b) + qabs(co.c) + qabs(co.at);
    if (co.scale == 0) throw CoefficientError("determinant form vanishes identically");

    // theta from the best-conditioned stationary point of det(A; tau)
    const qreal tau_d = qreal(0.5) * qatan2(-co.b, co.a - co.c);
    qreal best_tau = 0, best = qabs(co.g(0));
    for (qreal cand : {tau_d, tau_d + QPI / 2, QPI / 4, QPI / 2}) {
        qreal ct = cand;
        while (ct < 0) ct += QPI;
        while (ct >= QPI) ct -= QPI;
        const qreal mag = qabs(co.g(ct));
        if (mag > best) {
            best = mag;
            best_tau = ct;
        }
    }
    if (best <= 1e-30Q * co.scale)
        throw CoefficientError("no non-singular tau sample available for the theta route");
    const QSolve sol = qsolve(t, best_tau);
    co.theta = sol.det * sol.i_value;
    // below the binary128 noise floor the product carries no information;
    // snap it so the zero-slope degeneracy is exact downstream
    if (qabs(co.theta) <= 1e-25Q * co.scale) co.theta = 0;
    co.gamma = co.theta / co.kw;

    const qreal den = 2 * co.at + co.b;
    co.near_wronskian_degeneracy = qabs(den) < 1e-8Q * co.scale;
    // d = at - gamma identically; the quotient form is kept when the
    // denominator is healthy so both routes get exercised
    co.d = co.near_wronskian_degeneracy ? co.at - co.gamma : (co.at * co.at - co.a * co.c) / den;

    co.x = (co.a * co.a - co.b * co.b - co.c * co.c) / 2 + co.b * (co.gamma - co.at);
    co.y = (co.gamma - co.at) * (co.c - co.a) + co.a * co.b;
    return co;
}

qreal singular_floor(const QCoeffs& co) {
    return 1e-12Q * (qabs(co.a) + qabs(co.b) + qabs(co.c));
}

}  // namespace detail

RotatedTable rotate(const ElementTable& table, double tau) {
    if (!(tau >= 0.0 && tau < M_PI))
        throw std::domain_error("rotation phase tau must lie in [0, pi)");
    const detail::QTable qt(table);
    const detail::QRotated r = detail::qrotate(qt, tau);
    RotatedTable out;
    out.tau = tau;
    out.source = &table;
    out.ss = to_double(r.ss);
    out.sc = to_double(r.sc);
    out.cs = to_double(r.cs);
    out.cc = to_double(r.cc);
    out.s_chi.resize(table.m);
    out.c_chi.resize(table.m);
    for (int i = 0; i < table.m; ++i) {
        out.s_chi[i] = to_double(r.s_chi[i]);
        out.c_chi[i] = to_double(r.c_chi[i]);
    }
    return out;
}

KohnSystem build_kohn_system(const RotatedTable& rt) {
    const ElementTable& t = *rt.source;
    const int m = t.m;
    KohnSystem sys;
    sys.tau = rt.tau;
    sys.a = Mat<double>(m + 1, m + 1);
    sys.b.resize(m + 1);
    sys.a(0, 0) = rt.cc;
    sys.b[0] = rt.cs;
    for (int j = 0; j < m; ++j) {
        sys.a(0, j + 1) = rt.c_chi[j];
        sys.a(j + 1, 0) = rt.c_chi[j];
        sys.b[j + 1] = rt.s_chi[j];
        for (int i = 0; i < m; ++i) sys.a(i + 1, j + 1) = t.chi(i, j);
    }
    return sys;
}

DetCoefficients extract_det_coefficients(const ElementTable& table) {
    const detail::QTable qt(table);
    const detail::QCoeffs co = detail::qcoeffs(qt);
    DetCoefficients out;
    out.a = to_double(co.a);
    out.b = to_double(co.b);
    out.c = to_double(co.c);
    out.at = to_double(co.at);
    out.bt = to_double(co.a - co.c);
    out.ct = to_double(co.at + co.b);
    out.theta = to_double(co.theta);
    out.gamma = to_double(co.gamma);
    out.d = to_double(co.d);
    out.x = to_double(co.x);
    out.y = to_double(co.y);
    out.k = table.k;
    out.wronskian = to_double(co.kw);
    out.scale = to_double(co.scale);
    out.near_wronskian_degeneracy = co.near_wronskian_degeneracy;
    return out;
}

ThetaInvarianceReport theta_invariance_check(const ElementTable& table,
                                             const std::vector<double>& taus) {
    const detail::QTable qt(table);
    const detail::QCoeffs co = detail::qcoeffs(qt);
    const qreal floor = detail::singular_floor(co);

    ThetaInvarianceReport rep;
    rep.theta_ref = to_double(co.theta);
    qreal lo = 0, hi = 0;
    bool first = true;
    for (double tau : taus) {
        if (qabs(co.g(tau)) <= floor) {
            ++rep.skipped;
            continue;
        }
        const detail::QSolve sol = detail::qsolve(qt, tau);
        const qreal theta = sol.det * sol.i_value;
        rep.samples.push_back(to_double(theta));
        if (first) {
            lo = hi = theta;
            first = false;
        } else {
            lo = qmin(lo, theta);
            hi = qmax(hi, theta);
        }
    }
    if (!first) {
        rep.spread = to_double(hi - lo);
        const qreal denom = qmax(qabs(co.theta), 1e-300Q);
        rep.relative_spread = to_double((hi - lo) / denom);
    }
    return rep;
}

namespace {

qreal qdet_minor(const Mat<double>& x, const std::vector<int>& drop_rows,
                 const std::vector<int>& drop_cols) {
    const int n = static_cast<int>(x.rows());
    std::vector<int> rows, cols;
    for (int i = 0; i < n; ++i)
        if (std::find(drop_rows.begin(), drop_rows.end(), i) == drop_rows.end())
            rows.push_back(i);
    for (int j = 0; j < n; ++j)
        if (std::find(drop_cols.begin(), drop_cols.end(), j) == drop_cols.end())
            cols.push_back(j);
    QMat sub(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = qreal(x(rows[i], cols[j]));
    return determinant(std::move(sub));
}

}  // namespace

double desnanot_jacobi_check(const Mat<double>& x, int i, int j, int p, int q) {
    const int n = static_cast<int>(x.rows());
    if (n < 3) throw std::domain_error("matrix dimension must be >= 3");
    for (int idx : {i, j, p, q})
        if (idx < 0 || idx >= n) throw std::domain_error("minor index out of range");

    // zero-matrix convention for the doubly-reduced determinant
    if (i == p || j == q) return 0.0;

    QMat full(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) full(r, c) = qreal(x(r, c));
    const qreal det_x = determinant(full);
    const qreal det_red = qdet_minor(x, {i, p}, {j, q});
    const qreal m_ij = qdet_minor(x, {i}, {j});
    const qreal m_pq = qdet_minor(x, {p}, {q});
    const qreal m_pj = qdet_minor(x, {p}, {j});
    const qreal m_iq = qdet_minor(x, {i}, {q});
    const int sigma_ip = i < p ? 1 : 0;
    const int sigma_jq = j < q ? 1 : 0;
    const qreal sign = ((sigma_ip + sigma_jq) % 2 == 0) ? 1 : -1;
    return to_double(qabs(det_x * det_red - sign * (m_ij * m_pq - m_pj * m_iq)));
}

}  // namespace kohnlab
