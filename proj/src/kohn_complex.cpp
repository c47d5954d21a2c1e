#include "kohnlab/kohn_complex.hpp"

#include <cmath>
#include <random>

namespace kohnlab {

namespace detail {

namespace {

struct OpenChannel {
    // bilinear residual integrals of the trial family F0 + a F1 over the
    // rotated table; chi rows of the test space and of F0 separately
    qcomplex f1f1, f1f0, f0f0, f0f1;
    std::vector<qcomplex> f1chi, f0chi;
    qcomplex wronskian;  // B(F0,F1) - B(F1,F0), the correction constant
};

OpenChannel make_channel(const QTable& t, const QRotated& r, OpenChannelForm form) {
    OpenChannel ch;
    const int m = t.m;
    ch.f1chi.resize(m);
    ch.f0chi.resize(m);
    const qcomplex i1{0, 1};
    switch (form) {
        case OpenChannelForm::KMatrix:
            // F0 = S, F1 = S + iC
            ch.f1f1 = qcomplex(r.ss - r.cc, r.sc + r.cs);
            ch.f1f0 = qcomplex(r.ss, r.cs);
            ch.f0f1 = qcomplex(r.ss, r.sc);
            ch.f0f0 = qcomplex(r.ss, 0);
            for (int j = 0; j < m; ++j) {
                ch.f1chi[j] = qcomplex(r.s_chi[j], r.c_chi[j]);
                ch.f0chi[j] = qcomplex(r.s_chi[j], 0);
            }
            ch.wronskian = i1 * (r.sc - r.cs);
            break;
        case OpenChannelForm::TMatrix:
            // F0 = S, F1 = C + iS
            ch.f1f1 = qcomplex(r.cc - r.ss, r.cs + r.sc);
            ch.f1f0 = qcomplex(r.cs, r.ss);
            ch.f0f1 = qcomplex(r.sc, r.ss);
            ch.f0f0 = qcomplex(r.ss, 0);
            for (int j = 0; j < m; ++j) {
                ch.f1chi[j] = qcomplex(r.c_chi[j], r.s_chi[j]);
                ch.f0chi[j] = qcomplex(r.s_chi[j], 0);
            }
            ch.wronskian = qcomplex(r.sc - r.cs, 0);
            break;
        case OpenChannelForm::SMatrix:
            // F0 = C - iS, F1 = -(C + iS)
            ch.f1f1 = qcomplex(r.cc - r.ss, r.cs + r.sc);
            ch.f1f0 = -qcomplex(r.cc + r.ss, r.sc - r.cs);
            ch.f0f1 = -qcomplex(r.cc + r.ss, r.cs - r.sc);
            ch.f0f0 = qcomplex(r.cc - r.ss, -(r.cs + r.sc));
            for (int j = 0; j < m; ++j) {
                ch.f1chi[j] = -qcomplex(r.c_chi[j], r.s_chi[j]);
                ch.f0chi[j] = qcomplex(r.c_chi[j], -r.s_chi[j]);
            }
            ch.wronskian = qcomplex(0, 2 * (r.sc - r.cs));
            break;
    }
    return ch;
}

}  // namespace

QComplexSolve qsolve_complex(const QTable& t, qreal tau, OpenChannelForm form) {
    const QRotated r = qrotate(t, tau);
    const OpenChannel ch = make_channel(t, r, form);
    const int m = t.m;
    QCMat a(m + 1, m + 1);
    a(0, 0) = ch.f1f1;
    std::vector<qcomplex> rhs(m + 1);
    rhs[0] = -ch.f1f0;
    for (int j = 0; j < m; ++j) {
        a(0, j + 1) = ch.f1chi[j];
        a(j + 1, 0) = ch.f1chi[j];
        rhs[j + 1] = -ch.f0chi[j];
        for (int i = 0; i < m; ++i) a(i + 1, j + 1) = qcomplex(t.chi(i, j), 0);
    }
    QComplexSolve out;
    out.p.resize(m);
    // column-substituted determinant, evaluated independently of the solve
    QCMat a_mod = a;
    for (int i = 0; i <= m; ++i) a_mod(i, 0) = rhs[i];
    out.det_mod = determinant(std::move(a_mod));
    std::vector<qcomplex> x = solve(a, rhs, &out.det);
    out.a_t = x[0];
    for (int i = 0; i < m; ++i) out.p[i] = x[i + 1];
    qcomplex iv = ch.f0f0 + out.a_t * ch.f0f1;
    for (int i = 0; i < m; ++i) iv += out.p[i] * ch.f0chi[i];
    out.i_value = iv;
    out.a_v = out.a_t - iv / ch.wronskian;
    return out;
}

qcomplex qu_fn(const QCoeffs& co, qreal tau) {
    const qcomplex i1{0, 1};
    const qcomplex w = qcos(tau) * qpolar(1, -tau);
    return -i1 * co.c - qcomplex(co.at) + (i1 * co.c - i1 * co.a - qcomplex(co.b)) * w +
           qcomplex(co.gamma);
}

qcomplex qv_fn(const QCoeffs& co, qreal tau) {
    const qcomplex i1{0, 1};
    const qcomplex z = qpolar(1, -2 * tau);
    return (qcomplex(co.a - co.c) - i1 * co.b) * z - i1 * qu_fn(co, tau);
}

}  // namespace detail

std::string to_string(OpenChannelForm f) {
    switch (f) {
        case OpenChannelForm::KMatrix: return "K";
        case OpenChannelForm::TMatrix: return "T";
        case OpenChannelForm::SMatrix: return "S";
    }
    return "?";
}

namespace {

std::complex<double> to_cd(const qcomplex& z) { return {to_double(z.re), to_double(z.im)}; }

// principal-branch complex atan with the real part wrapped to (-pi/2, pi/2]
std::complex<double> wrap_complex_phase(std::complex<double> eta) {
    double re = eta.real();
    while (re > M_PI / 2) re -= M_PI;
    while (re <= -M_PI / 2) re += M_PI;
    return {re, eta.imag()};
}

// eta for a given variational amplitude in each parametrization
std::complex<double> eta_from_amplitude(OpenChannelForm form, std::complex<double> a_v,
                                        double tau) {
    const std::complex<double> i1{0.0, 1.0};
    std::complex<double> tanv;
    switch (form) {
        case OpenChannelForm::KMatrix:
            tanv = i1 * a_v / (1.0 + a_v);
            break;
        case OpenChannelForm::TMatrix:
            tanv = a_v / (1.0 + i1 * a_v);
            break;
        case OpenChannelForm::SMatrix:
            tanv = i1 * (1.0 - a_v) / (1.0 + a_v);
            break;
    }
    return wrap_complex_phase(tau + std::atan(tanv));
}

}  // namespace

ComplexSolution solve_complex(const ElementTable& table, double tau, OpenChannelForm form) {
    const detail::QTable qt(table);
    const detail::QCoeffs co = detail::qcoeffs(qt);

    // det(A') lies on a circle of radius |a - c - i b|; it vanishes for all
    // tau at once or never
    const qreal radius = qhypot(co.a - co.c, co.b);
    if (radius <= 1e-30Q * co.scale)
        throw SingularSystemError("complex Kohn matrix is singular for every tau",
                                  to_double(radius), 0.0);

    const detail::QComplexSolve sol = detail::qsolve_complex(qt, tau, form);
    ComplexSolution out;
    out.form = form;
    out.tau = tau;
    out.a_t = to_cd(sol.a_t);
    out.a_v = to_cd(sol.a_v);
    out.i_value = to_cd(sol.i_value);
    out.det_a = to_cd(sol.det);
    out.p.resize(table.m);
    for (int i = 0; i < table.m; ++i) out.p[i] = to_cd(sol.p[i]);

    out.det_a_mod = to_cd(sol.det_mod);
    out.eta_v = eta_from_amplitude(form, out.a_v, tau);
    return out;
}

std::complex<double> eta_complex_via_determinants(const DetCoefficients& coeffs, double tau) {
    detail::QCoeffs co;
    co.a = coeffs.a;
    co.b = coeffs.b;
    co.c = coeffs.c;
    co.at = coeffs.at;
    co.gamma = coeffs.gamma;
    co.theta = coeffs.theta;
    co.kw = coeffs.wronskian;
    co.scale = coeffs.scale;
    const qcomplex u = detail::qu_fn(co, tau);
    const qcomplex v = detail::qv_fn(co, tau);
    if (qabs(v) <= 1e-30Q * co.scale)
        throw SingularSystemError("complex route denominator v(tau) vanished", to_double(qabs(v)),
                                  0.0);
    const qcomplex w = u / v;
    return wrap_complex_phase(tau + std::atan(std::complex<double>(to_double(w.re), to_double(w.im))));
}

EquivalenceReport equivalence_check(const ElementTable& table, unsigned seed) {
    const detail::QTable qt(table);
    const detail::QCoeffs co = detail::qcoeffs(qt);
    const DetCoefficients coeffs = extract_det_coefficients(table);

    const TauAnalysis opt = optimize_tau(coeffs);
    if (opt.degeneracy != Degeneracy::None)
        throw DegenerateError("equivalence undefined at a degenerate wavenumber: " +
                              to_string(opt.degeneracy));

    EquivalenceReport rep;
    rep.eta0 = opt.eta0;
    rep.slope_at_tau0 = opt.slope_at_tau0;

    const double tau_ref = opt.tau0;
    const ComplexSolution ck = solve_complex(table, tau_ref, OpenChannelForm::KMatrix);
    rep.eta_complex = ck.eta_v;

    rep.re_match_defect = phase_distance(ck.eta_v.real(), opt.eta0);
    if (opt.slope_at_tau0 < 1.0) {
        rep.im_formula_defect =
            std::abs(ck.eta_v.imag() - to_double(qatanh(qreal(opt.slope_at_tau0))));
    } else {
        rep.slope_exceeds_unity = true;
        rep.im_formula_defect = std::abs(ck.eta_v.imag());
    }

    // tau grid: flatness, circle radius, route agreement, structure identities
    const int grid = 16;
    const qreal radius = qhypot(co.a - co.c, co.b);
    for (int i = 0; i < grid; ++i) {
        const double tau = (i + 0.5) * M_PI / grid;
        const ComplexSolution c = solve_complex(table, tau, OpenChannelForm::KMatrix);
        rep.tau_flatness =
            std::max(rep.tau_flatness,
                     std::hypot(phase_distance(c.eta_v.real(), ck.eta_v.real()),
                                c.eta_v.imag() - ck.eta_v.imag()));
        rep.det_circle_defect = std::max(
            rep.det_circle_defect, std::abs(std::abs(c.det_a) - to_double(radius)) / to_double(radius));

        const std::complex<double> ed = eta_complex_via_determinants(coeffs, tau);
        rep.route_agreement_defect =
            std::max(rep.route_agreement_defect,
                     std::hypot(phase_distance(ed.real(), c.eta_v.real()), ed.imag() - c.eta_v.imag()));

        // u^2 + v^2 + v u' - u v' = 0, with derivatives u' = rho w', v' = -2i sigma z - i u'
        const qcomplex i1{0, 1};
        const qcomplex u = detail::qu_fn(co, tau);
        const qcomplex v = detail::qv_fn(co, tau);
        const qcomplex z = qpolar(1, -2 * qreal(tau));
        const qcomplex rho = i1 * co.c - i1 * co.a - qcomplex(co.b);
        const qcomplex up = rho * (-i1 * z);  // d/dtau [cos(tau) e^{-i tau}] = -i e^{-2 i tau}
        const qcomplex sigma = qcomplex(co.a - co.c) - i1 * co.b;
        const qcomplex vp = qreal(-2) * (i1 * sigma * z) - i1 * up;
        const qcomplex resid = u * u + v * v + v * up - u * vp;
        const qreal uv_scale = qmax(qabs(u) * qabs(u) + qabs(v) * qabs(v), 1e-300Q);
        rep.uv_identity_defect =
            std::max(rep.uv_identity_defect, to_double(qabs(resid) / uv_scale));

        // det(A') I' = -theta
        const detail::QComplexSolve sk = detail::qsolve_complex(qt, tau, OpenChannelForm::KMatrix);
        rep.theta_mirror_defect = std::max(
            rep.theta_mirror_defect,
            to_double(qabs(sk.det * sk.i_value + qcomplex(co.theta)) / qabs(co.theta)));
    }

    // open-channel form relations at tau_ref
    {
        const detail::QComplexSolve k = detail::qsolve_complex(qt, tau_ref, OpenChannelForm::KMatrix);
        const detail::QComplexSolve tt = detail::qsolve_complex(qt, tau_ref, OpenChannelForm::TMatrix);
        const detail::QComplexSolve s = detail::qsolve_complex(qt, tau_ref, OpenChannelForm::SMatrix);
        const qcomplex i1{0, 1};
        rep.s_from_t_defect = to_double(qabs(s.a_v - (qcomplex(1) + 2 * (i1 * tt.a_v))));
        rep.t_from_k_defect = to_double(qabs(tt.a_v - i1 * qconj(k.a_v)));
        rep.t_from_k_conj_defect = to_double(qabs(tt.a_v + i1 * qconj(k.a_v)));

        const std::complex<double> eta_t = eta_from_amplitude(OpenChannelForm::TMatrix, to_cd(tt.a_v), tau_ref);
        rep.t_eta_mirror_defect = std::abs(eta_t.imag() + ck.eta_v.imag());
    }

    // real/imaginary closed forms of tan(eta0 - eta' - tau0 + tau)
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.05, M_PI - 0.05);
    const std::complex<double> etac = ck.eta_v;
    for (int i = 0; i < 8; ++i) {
        const double tau = uni(rng);
        const std::complex<double> lhs =
            std::tan(std::complex<double>(opt.eta0 - etac.real() - opt.tau0 + tau, -etac.imag()));
        const qreal av = co.x * qsin(2 * qreal(tau)) + co.y * qcos(2 * qreal(tau));
        const qreal fv = co.f(tau), gv = co.g(tau);
        const qreal bv = -(fv * fv + gv * gv);
        const double re_expect = to_double(av / bv);
        const double im_expect = to_double(co.gamma * co.gamma / bv);
        rep.tan_re_defect = std::max(
            rep.tan_re_defect, std::abs(lhs.real() - re_expect) /
                                   std::max({std::abs(re_expect), std::abs(im_expect), 1e-300}));
        rep.tan_im_defect =
            std::max(rep.tan_im_defect, std::abs(lhs.imag() - im_expect) / std::abs(im_expect));
        if (!(lhs.imag() < 0)) rep.tan_im_all_negative = false;
    }
    return rep;
}

}  // namespace kohnlab
