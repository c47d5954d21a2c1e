#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "kohnlab/kohn_complex.hpp"
#include "kohnlab/kohn_real.hpp"

using namespace kohnlab;
using cd = std::complex<double>;

namespace {

ElementTable default_table(double k = 0.5) {
    return assemble_elements(default_problem(k), BasisSet::default_m8());
}

}  // namespace

TEST_CASE("zero potential gives a vanishing complex phase shift") {
    RadialProblem pb = default_problem(0.5);
    pb.potential = make_potential("zero", 0.0, 0.0);
    const ElementTable t = assemble_elements(pb, BasisSet::default_m8());
    for (double tau : {0.0, 0.6, 2.3}) {
        const ComplexSolution s = solve_complex(t, tau, OpenChannelForm::KMatrix);
        CHECK(std::abs(s.eta_v) < 1e-12);
    }
}

TEST_CASE("determinant of the complex system moves on a circle") {
    const ElementTable t = default_table();
    const DetCoefficients co = extract_det_coefficients(t);
    const double radius = std::hypot(co.a - co.c, co.b);
    for (int i = 0; i < 16; ++i) {
        const double tau = (i + 0.5) * M_PI / 16;
        const ComplexSolution s = solve_complex(t, tau, OpenChannelForm::KMatrix);
        CHECK(std::abs(std::abs(s.det_a) - radius) < 1e-10 * radius);
        // and the full complex value, not just the modulus
        const cd expect = cd(co.a - co.c, -co.b) * std::exp(cd(0.0, -2.0 * tau));
        CHECK(std::abs(s.det_a - expect) < 1e-10 * radius);
        // Cramer consistency of the independently evaluated determinants
        CHECK(std::abs(s.a_t * s.det_a - s.det_a_mod) < 1e-12 * radius);
    }
}

TEST_CASE("determinant route matches the linear-system route") {
    const ElementTable t = default_table();
    const DetCoefficients co = extract_det_coefficients(t);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    for (int i = 0; i < 16; ++i) {
        const double tau = uni(rng);
        const ComplexSolution s = solve_complex(t, tau, OpenChannelForm::KMatrix);
        const cd e = eta_complex_via_determinants(co, tau);
        CHECK(phase_distance(e.real(), s.eta_v.real()) < 1e-9);
        CHECK(std::abs(e.imag() - s.eta_v.imag()) < 1e-9);
    }
}

TEST_CASE("u/v structure functions") {
    const ElementTable t = default_table();
    const detail::QTable qt(t);
    const detail::QCoeffs co = detail::qcoeffs(qt);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    for (int i = 0; i < 16; ++i) {
        const qreal tau = uni(rng);
        const qcomplex u = detail::qu_fn(co, tau);
        const qcomplex v = detail::qv_fn(co, tau);
        const qcomplex i1{0, 1};
        const qcomplex z = qpolar(1, -2 * tau);
        const qcomplex up = (i1 * co.c - i1 * co.a - qcomplex(co.b)) * (-i1 * z);
        const qcomplex vp = qreal(-2) * (i1 * (qcomplex(co.a - co.c) - i1 * co.b) * z) - i1 * up;
        const qcomplex resid = u * u + v * v + v * up - u * vp;
        const qreal scale = qabs(u) * qabs(u) + qabs(v) * qabs(v);
        CHECK(to_double(qabs(resid) / scale) < 1e-10);

        // Im[v' - u] recovers the real determinant form
        CHECK(to_double(qabs((vp - u).im - co.g(tau))) < 1e-25 * to_double(co.scale));
    }
}

TEST_CASE("product of the complex determinant and functional mirrors theta") {
    const ElementTable t = default_table();
    const detail::QTable qt(t);
    const detail::QCoeffs co = detail::qcoeffs(qt);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    for (int i = 0; i < 8; ++i) {
        const auto s = detail::qsolve_complex(qt, uni(rng), OpenChannelForm::KMatrix);
        CHECK(to_double(qabs(s.det * s.i_value + qcomplex(co.theta)) / qabs(co.theta)) < 1e-9);
    }
}

TEST_CASE("open-channel form relations are exact linear algebra") {
    const ElementTable t = default_table();
    const detail::QTable qt(t);
    const qcomplex i1{0, 1};
    for (double tau : {0.0, 0.3, 1.1, 2.6}) {
        const auto k = detail::qsolve_complex(qt, tau, OpenChannelForm::KMatrix);
        const auto tt = detail::qsolve_complex(qt, tau, OpenChannelForm::TMatrix);
        const auto s = detail::qsolve_complex(qt, tau, OpenChannelForm::SMatrix);

        // conjugating the K-form system maps it onto the T-form system, so
        // a^T = -i conj(a'); the trial vectors conjugate likewise
        CHECK(to_double(qabs(tt.a_v + i1 * qconj(k.a_v))) < 1e-12);
        CHECK(to_double(qabs(tt.a_t + i1 * qconj(k.a_t))) < 1e-12);
        for (std::size_t j = 0; j < k.p.size(); ++j)
            CHECK(to_double(qabs(tt.p[j] - qconj(k.p[j]))) < 1e-12);

        CHECK(to_double(qabs(s.a_v - (qcomplex(1) + qreal(2) * (i1 * tt.a_v)))) < 1e-9);
    }
}

TEST_CASE("variant phase shifts are conjugate mirrors") {
    const ElementTable t = default_table();
    const ComplexSolution k = solve_complex(t, 0.8, OpenChannelForm::KMatrix);
    const ComplexSolution tt = solve_complex(t, 0.8, OpenChannelForm::TMatrix);
    const ComplexSolution s = solve_complex(t, 0.8, OpenChannelForm::SMatrix);
    CHECK(phase_distance(k.eta_v.real(), tt.eta_v.real()) < 1e-10);
    CHECK(std::abs(k.eta_v.imag() + tt.eta_v.imag()) < 1e-10);
    CHECK(k.eta_v.imag() > 0.0);
    // the S-form estimate carries the same phase information
    CHECK(phase_distance(s.eta_v.real(), k.eta_v.real()) < 1e-9);
}

TEST_CASE("equivalence battery at the default wavenumbers") {
    for (double k : {0.2, 0.5, 0.9}) {
        const ElementTable t = default_table(k);
        const EquivalenceReport eq = equivalence_check(t);
        CHECK(eq.re_match_defect < 1e-10);
        CHECK(!eq.slope_exceeds_unity);
        CHECK(eq.im_formula_defect < 1e-9);
        CHECK(eq.eta_complex.imag() > 0.0);
        CHECK(eq.tau_flatness < 1e-10);
        CHECK(eq.det_circle_defect < 1e-10);
        CHECK(eq.uv_identity_defect < 1e-10);
        CHECK(eq.theta_mirror_defect < 1e-9);
        CHECK(eq.route_agreement_defect < 1e-9);
        CHECK(eq.s_from_t_defect < 1e-9);
        CHECK(eq.t_eta_mirror_defect < 1e-9);
        CHECK(eq.t_from_k_conj_defect < 1e-9);
        // the conjugation flips the sign of the i prefactor; the unmirrored
        // form differs by a full 2|a^T|
        CHECK(eq.t_from_k_defect > 0.1);
        CHECK(eq.tan_re_defect < 1e-8);
        CHECK(eq.tan_im_defect < 1e-8);
        CHECK(eq.tan_im_all_negative);
    }
}

TEST_CASE("degenerate wavenumbers are refused") {
    RadialProblem pb = default_problem(0.5);
    pb.potential = make_potential("zero", 0.0, 0.0);
    const ElementTable t = assemble_elements(pb, BasisSet::default_m8());
    CHECK_THROWS_AS(equivalence_check(t), DegenerateError);
}

TEST_CASE("an everywhere-singular complex system is reported") {
    // hand-built table with a = c and b = 0: the determinant circle has
    // zero radius, so no mixing angle can rescue the solve
    ElementTable t;
    t.m = 0;
    t.ss = 1.0;
    t.cc = 1.0;
    t.sc = 0.5;
    t.cs = -0.5;
    t.k = 0.5;
    t.k_tilde = 1.0;
    CHECK_THROWS_AS(solve_complex(t, 0.3, OpenChannelForm::KMatrix), SingularSystemError);
}

TEST_CASE("vanishing structure-function denominator is reported") {
    DetCoefficients co;
    co.a = co.b = co.c = 0.0;
    co.at = 1.0;
    co.gamma = 1.0;  // u and v vanish identically for these values
    co.theta = 1.0;
    co.wronskian = 1.0;
    co.scale = 1.0;
    CHECK_THROWS_AS(eta_complex_via_determinants(co, 0.7), SingularSystemError);
}
