#include <doctest.h>

#include <cmath>
#include <random>

#ifdef KOHNLAB_HAVE_EIGEN
#include <Eigen/Dense>
#endif

#include "kohnlab/kohn_real.hpp"
#include "kohnlab/lmatrix.hpp"

using namespace kohnlab;

namespace {

ElementTable default_table(double k = 0.5) {
    return assemble_elements(default_problem(k), BasisSet::default_m8());
}

}  // namespace

TEST_CASE("empty short-range basis folds to the bare integrals") {
    const ElementTable t = assemble_elements(default_problem(0.5), BasisSet{});
    const LDecomposition dec = decompose(t);
    CHECK(dec.f_product == 1.0);
    CHECK(dec.l11() == doctest::Approx(t.ss).epsilon(1e-15));
    CHECK(dec.l12() == doctest::Approx(t.sc).epsilon(1e-15));
    CHECK(dec.l21() == doctest::Approx(t.cs).epsilon(1e-15));
    CHECK(dec.l22() == doctest::Approx(t.cc).epsilon(1e-15));
}

TEST_CASE("folded off-diagonal gap reproduces the antisymmetry constant") {
    const ElementTable t = default_table();
    const LDecomposition dec = decompose(t);
    CHECK(std::abs(dec.l12() - dec.l21() - t.wronskian()) < 1e-10 * std::abs(dec.l12()));
}

#ifdef KOHNLAB_HAVE_EIGEN
TEST_CASE("closed-block eigenvalues match an independent eigensolver") {
    const ElementTable t = default_table();
    const LDecomposition dec = decompose(t);
    Eigen::MatrixXd x(t.m, t.m);
    for (int i = 0; i < t.m; ++i)
        for (int j = 0; j < t.m; ++j) x(i, j) = t.chi(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    REQUIRE(es.info() == Eigen::Success);
    for (int f = 0; f < t.m; ++f)
        CHECK(std::abs(dec.mu[f] - es.eigenvalues()[f]) < 1e-12 * x.norm());
}
#endif

TEST_CASE("zero potential phase shift vanishes along the folded route") {
    RadialProblem pb = default_problem(0.5);
    pb.potential = make_potential("zero", 0.0, 0.0);
    const ElementTable t = assemble_elements(pb, BasisSet::default_m8());
    const LDecomposition dec = decompose(t);
    for (double tau : {0.0, 0.7, 2.1}) CHECK(std::abs(eta_via_L(dec, tau)) < 1e-12);
}

TEST_CASE("folding at a singular angle is reported, with the shared zero") {
    const ElementTable t = default_table();
    const DetCoefficients co = extract_det_coefficients(t);
    const TauAnalysis ana = optimize_tau(co);
    REQUIRE(!ana.singular_taus.empty());
    // det(A; tau) = F * L22(tau): the folded route rejects exactly the
    // angles the determinant route rejects
    const LDecomposition dec = decompose(t);
    CHECK_THROWS_AS(eta_via_L(dec, ana.singular_taus[0].tau), SingularSystemError);
}

TEST_CASE("folded route equals the determinant route") {
    const ElementTable t = default_table();
    const DetCoefficients co = extract_det_coefficients(t);
    const LDecomposition dec = decompose(t);
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    int compared = 0;
    while (compared < 8) {
        const double tau = uni(rng);
        try {
            const double e1 = eta_via_L(dec, tau);
            const double e2 = eta_via_determinants(co, tau);
            CHECK(phase_distance(e1, e2) < 1e-9);
            ++compared;
        } catch (const SingularSystemError&) {
        }
    }
}

TEST_CASE("rotation acts on the folded matrix by congruence") {
    const ElementTable t = default_table();
    const LDecomposition dec = decompose(t);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    const auto l0 = dec.engine->fold(0);
    qreal scale = 0;
    for (const auto& v : l0) scale = qmax(scale, qabs(v));
    for (int i = 0; i < 8; ++i) {
        const double tau = uni(rng);
        const auto lt = dec.engine->fold(tau);
        const qreal c = qcos(qreal(tau)), s = qsin(qreal(tau));
        const qreal r11 = c * c * l0[0] + c * s * (l0[1] + l0[2]) + s * s * l0[3];
        const qreal r12 = -s * c * l0[0] + c * c * l0[1] - s * s * l0[2] + s * c * l0[3];
        const qreal r21 = -s * c * l0[0] - s * s * l0[1] + c * c * l0[2] + s * c * l0[3];
        const qreal r22 = s * s * l0[0] - s * c * (l0[1] + l0[2]) + c * c * l0[3];
        CHECK(to_double(qabs(lt[0] - r11) / scale) < 1e-10);
        CHECK(to_double(qabs(lt[1] - r12) / scale) < 1e-10);
        CHECK(to_double(qabs(lt[2] - r21) / scale) < 1e-10);
        CHECK(to_double(qabs(lt[3] - r22) / scale) < 1e-10);

        // determinant of the fold is rotation-invariant
        const qreal det0 = l0[0] * l0[3] - l0[1] * l0[2];
        const qreal dett = lt[0] * lt[3] - lt[1] * lt[2];
        CHECK(to_double(qabs(dett - det0) / qabs(det0)) < 1e-10);

        // and the determinant factorization holds at every angle
        const detail::QTable qt(t);
        const qreal det_a = detail::qdet(qt, tau);
        CHECK(to_double(qabs(det_a - dec.engine->f_product * lt[3])) <
              1e-10 * to_double(qabs(det_a)));
    }
}

TEST_CASE("correspondence between coefficients and the folded matrix") {
    // no short-range functions: both sides coincide by construction
    const ElementTable t0 = assemble_elements(default_problem(0.5), BasisSet{});
    const CorrespondenceReport rep0 =
        correspondence_check(decompose(t0), extract_det_coefficients(t0));
    CHECK(rep0.max_defect < 1e-13);

    for (double k : {0.3, 0.5, 1.0}) {
        const ElementTable t = default_table(k);
        const CorrespondenceReport rep =
            correspondence_check(decompose(t), extract_det_coefficients(t));
        CHECK(rep.max_defect < 1e-8);
    }
}

TEST_CASE("wronskian-degenerate wavenumbers coincide with eigenvalue crossings") {
    // bracket a sign change of 2 at + b, then confirm a closed-block
    // eigenvalue sits at the collision energy
    auto value = [&](double k) {
        const ElementTable t = default_table(k);
        const DetCoefficients co = extract_det_coefficients(t);
        return 2 * co.at + co.b;
    };
    double lo = 0.325, hi = 0.35;
    REQUIRE(value(lo) * value(hi) < 0.0);
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) * value(lo) > 0)
            lo = mid;
        else
            hi = mid;
    }
    const double k_s = 0.5 * (lo + hi);
    const LDecomposition dec = decompose(default_table(k_s));
    double smallest = 1e300;
    for (double mu : dec.mu) smallest = std::min(smallest, std::abs(mu));
    CHECK(smallest < 1e-9);
    CHECK(!dec.pole_flags.empty());
}

TEST_CASE("phase shift is continuous across an eigenvalue crossing") {
    // 2 at + b changes sign inside this window (pole of the folded matrix)
    const double k_lo = 0.330, k_hi = 0.345;
    const int n = 60;
    std::vector<double> etas;
    for (int i = 0; i < n; ++i) {
        const double k = k_lo + (k_hi - k_lo) * i / (n - 1);
        etas.push_back(eta_via_L(decompose(default_table(k)), 0.3));
    }
    std::vector<double> jumps;
    for (int i = 0; i + 1 < n; ++i) jumps.push_back(phase_distance(etas[i], etas[i + 1]));
    std::vector<double> sorted = jumps;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (double j : jumps) CHECK(j <= 10.0 * median);
}
