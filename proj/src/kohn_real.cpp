#include "kohnlab/kohn_real.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace kohnlab {

namespace detail {

qreal qwrap_phase(qreal eta) {
    while (eta > QPI / 2) eta -= QPI;
    while (eta <= -QPI / 2) eta += QPI;
    return eta;
}

qreal qeta_unwrapped(const QCoeffs& co, qreal tau, qreal theta_ref) {
    // atan2(f, g) is continuous except across the branch cut; pull the
    // result into the 2*pi window centred on theta_ref
    qreal th = qatan2(co.f(tau), co.g(tau));
    while (th - theta_ref > QPI) th -= 2 * QPI;
    while (th - theta_ref < -QPI) th += 2 * QPI;
    return tau + th;
}

}  // namespace detail

double wrap_phase(double eta) {
    while (eta > M_PI / 2) eta -= M_PI;
    while (eta <= -M_PI / 2) eta += M_PI;
    return eta;
}

double phase_distance(double e1, double e2) {
    double d = std::fmod(std::abs(e1 - e2), M_PI);
    return std::min(d, M_PI - d);
}

GeneralizedSolution solve_generalized(const KohnSystem& system, const ElementTable& table) {
    const detail::QTable qt(table);
    const detail::QCoeffs co = detail::qcoeffs(qt);
    const qreal tau = system.tau;
    const qreal det = co.g(tau);
    const qreal floor = detail::singular_floor(co);
    if (qabs(det) <= floor) {
        const detail::QRotated r = detail::qrotate(qt, tau);
        const qreal cond = condition_estimate(detail::qmatrix(qt, r));
        throw SingularSystemError("Kohn matrix is numerically singular at tau = " +
                                      std::to_string(system.tau) + ": det(A) = " +
                                      std::to_string(to_double(det)),
                                  to_double(det), to_double(cond));
    }

    const detail::QSolve sol = detail::qsolve(qt, tau);
    GeneralizedSolution out;
    out.tau = system.tau;
    out.a_t = to_double(sol.a_t);
    out.p.resize(table.m);
    for (int i = 0; i < table.m; ++i) out.p[i] = to_double(sol.p[i]);
    out.i_value = to_double(sol.i_value);
    out.det_a = to_double(sol.det);
    out.det_a_mod = to_double(detail::qdet_mod(qt, tau));

    const qreal tanv = sol.a_t - sol.i_value / qt.kw;
    out.eta_unwrapped = to_double(tau + qatan(tanv));
    out.eta_v = to_double(detail::qwrap_phase(tau + qatan(tanv)));

    const detail::QRotated r = detail::qrotate(qt, tau);
    out.condition_estimate = to_double(condition_estimate(detail::qmatrix(qt, r)));
    return out;
}

namespace {

detail::QCoeffs promote(const DetCoefficients& c) {
    detail::QCoeffs q;
    q.a = c.a;
    q.b = c.b;
    q.c = c.c;
    q.at = c.at;
    q.theta = c.theta;
    q.gamma = c.gamma;
    q.d = c.d;
    q.x = c.x;
    q.y = c.y;
    q.kw = c.wronskian;
    q.scale = c.scale;
    q.near_wronskian_degeneracy = c.near_wronskian_degeneracy;
    return q;
}

// gamma floor below which the slope is treated as identically zero
qreal gamma_floor(const detail::QCoeffs& co) { return 1e-20Q * co.scale; }

}  // namespace

double eta_via_determinants(const DetCoefficients& coeffs, double tau) {
    const detail::QCoeffs co = promote(coeffs);
    const qreal g = co.g(tau);
    if (qabs(g) <= detail::singular_floor(co))
        throw SingularSystemError(
            "phase shift undefined: det(A; tau) = 0 at tau = " + std::to_string(tau),
            to_double(g), 0.0);
    return to_double(detail::qwrap_phase(qreal(tau) + qatan(co.f(tau) / g)));
}

double slope(const DetCoefficients& coeffs, double tau) {
    const detail::QCoeffs co = promote(coeffs);
    const qreal fv = co.f(tau), gv = co.g(tau);
    const qreal denom = fv * fv + gv * gv;
    if (denom == 0)
        throw CoefficientError("f and g vanish together; wavenumber is on the excluded set");
    return to_double(co.gamma * co.gamma / denom);
}

TauAnalysis optimize_tau(const DetCoefficients& coeffs) {
    const detail::QCoeffs co = promote(coeffs);
    TauAnalysis out;

    if (qabs(co.gamma) <= gamma_floor(co)) {
        out.degeneracy = Degeneracy::ZeroSlope;
        return out;
    }
    const qreal xy_scale = co.scale * co.scale;
    if (qabs(co.x) <= 1e-20Q * xy_scale && qabs(co.y) <= 1e-20Q * xy_scale) {
        out.degeneracy = Degeneracy::ConstantSlope;
        return out;
    }

    // x sin(2 tau) + y cos(2 tau) = 0 has exactly two roots in [0, pi),
    // pi/2 apart by periodicity of tan(2 tau)
    qreal t0 = qreal(0.5) * qatan2(-co.y, co.x);
    while (t0 < 0) t0 += QPI;
    while (t0 >= QPI) t0 -= QPI;
    qreal t1 = t0 + QPI / 2;
    if (t1 >= QPI) t1 -= QPI;

    const qreal s0 = co.slope(t0), s1 = co.slope(t1);
    if (s0 > s1) std::swap(t0, t1);
    out.tau0 = to_double(t0);
    out.tau1 = to_double(t1);
    out.slope_at_tau0 = to_double(qmin(s0, s1));
    out.slope_at_tau1 = to_double(qmax(s0, s1));

    // sign of the third derivative at the minimizer: -4 gamma^2 (x cos 2t - y sin 2t)
    // over a positive denominator; positive curvature growth marks the minimum
    const qreal third = -(co.x * qcos(2 * t0) - co.y * qsin(2 * t0));
    out.minimizer_by_third_derivative_agrees = third > 0;

    // the shared extremal value of tan(eta - tau)
    const qreal tanv = (2 * co.at + co.b - 2 * co.gamma) / (co.a + co.c);
    out.eta0 = to_double(detail::qwrap_phase(t0 + qatan(tanv)));
    out.eta1 = to_double(detail::qwrap_phase(t1 + qatan(tanv)));

    // singular tau values: roots of the det(A) quadratic form, solved as
    // a tan(tau) quadratic: a t^2 + b t + c = 0 (plus tau = pi/2 when a = 0)
    std::vector<qreal> roots;
    if (qabs(co.a) > 0) {
        const qreal disc = co.b * co.b - 4 * co.a * co.c;
        if (disc >= 0) {
            const qreal sq = qsqrt(disc);
            // numerically stable quadratic roots
            const qreal q = -(co.b + (co.b >= 0 ? sq : -sq)) / 2;
            if (qabs(co.a) > 0) roots.push_back(qatan(q / co.a));
            if (qabs(q) > 0) roots.push_back(qatan(co.c / q));
            else roots.push_back(qatan(qreal(0)));  // double root at t = 0 when b = c = 0
        }
    } else {
        // g = b sin cos + c cos^2 = cos (b sin + c cos): tau = pi/2 is a root
        roots.push_back(QPI / 2);
        if (qabs(co.b) > 0) roots.push_back(qatan(-co.c / co.b));
    }
    for (qreal ts : roots) {
        while (ts < 0) ts += QPI;
        while (ts >= QPI) ts -= QPI;
        SingularTau s;
        s.tau = to_double(ts);
        const qreal fv = co.f(ts);
        s.ratio = to_double(fv * fv / (co.gamma * co.gamma));
        if (s.ratio > 10.0)
            s.classification = SingularityClass::AnomalyFree;
        else if (s.ratio < 0.1)
            s.classification = SingularityClass::Anomalous;
        else
            s.classification = SingularityClass::Marginal;
        out.singular_taus.push_back(s);
    }
    std::sort(out.singular_taus.begin(), out.singular_taus.end(),
              [](const SingularTau& a, const SingularTau& b) { return a.tau < b.tau; });
    // drop duplicates from a double root
    for (std::size_t i = 1; i < out.singular_taus.size();)
        if (std::abs(out.singular_taus[i].tau - out.singular_taus[i - 1].tau) < 1e-12)
            out.singular_taus.erase(out.singular_taus.begin() + i);
        else
            ++i;
    return out;
}

StationaryDetResult stationary_det_taus(const DetCoefficients& coeffs) {
    const detail::QCoeffs co = promote(coeffs);
    const qreal xy_scale = qabs(co.a - co.c) + qabs(co.b);
    if (xy_scale <= 1e-20Q * co.scale)
        throw DegenerateError("det(A; tau) is constant: a = c and b = 0");

    // (a - c) sin(2 tau) + b cos(2 tau) = 0
    qreal td = qreal(0.5) * qatan2(-co.b, co.a - co.c);
    while (td < 0) td += QPI;
    while (td >= QPI) td -= QPI;
    qreal td2 = td + QPI / 2;
    if (td2 >= QPI) td2 -= QPI;

    StationaryDetResult out;
    out.tau_d1 = to_double(td);
    out.tau_d2 = to_double(td2);
    out.det_at_d1 = to_double(co.g(td));
    out.det_at_d2 = to_double(co.g(td2));
    const qreal prod = co.g(td) * co.g(td2);
    const qreal floor = detail::singular_floor(co);
    if (qabs(co.g(td)) <= floor || qabs(co.g(td2)) <= floor)
        out.singularity_count = 1;
    else
        out.singularity_count = prod > 0 ? 0 : 2;
    return out;
}

std::string to_string(Degeneracy d) {
    switch (d) {
        case Degeneracy::None: return "none";
        case Degeneracy::ZeroSlope: return "zero_slope";
        case Degeneracy::ConstantSlope: return "constant_slope";
    }
    return "?";
}

std::string to_string(SingularityClass c) {
    switch (c) {
        case SingularityClass::AnomalyFree: return "anomaly-free";
        case SingularityClass::Anomalous: return "anomalous";
        case SingularityClass::Marginal: return "marginal";
    }
    return "?";
}

}  // namespace kohnlab
