#include <doctest.h>

#include <cmath>

#include "kohnlab/model.hpp"

using namespace kohnlab;

namespace {

// independent antisymmetry oracle: the gap <S,(H-E)C> - <C,(H-E)S> evaluated
// with a finer rule than anything the assembler used
double antisymmetry_gap_oracle(const RadialProblem& pb) {
    const QuadratureRule rule = build_rule(pb, 4096);
    const double k = pb.k, n0 = pb.normalization, beta = pb.beta;
    double sc = 0, cs = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = rule.nodes[i], w = rule.weights[i];
        const double v = pb.potential(r);
        const double s = n0 * std::sin(k * r);
        const double c = n0 * std::cos(k * r) * (1.0 - std::exp(-beta * r));
        const double hec = n0 * std::exp(-beta * r) *
                               (k * beta * std::sin(k * r) + 0.5 * beta * beta * std::cos(k * r)) +
                           v * c;
        sc += w * s * hec;
        cs += w * c * v * s;
    }
    return sc - cs;
}

}  // namespace

TEST_CASE("zero potential rows vanish identically") {
    RadialProblem pb = default_problem(0.7);
    pb.potential = make_potential("zero", 0.0, 0.0);
    const ElementTable t = assemble_elements(pb, BasisSet::default_m8());
    CHECK(t.ss == 0.0);  // (H-E)S vanishes pointwise, so the sums are exact zeros
    CHECK(t.cs == 0.0);
    for (double v : t.s_chi) CHECK(v == 0.0);
    CHECK(t.sc == doctest::Approx(t.k_tilde).epsilon(1e-10));
}

TEST_CASE("antisymmetry constant is N^2 k / 2") {
    // N = 1, k = 0.5: the constant is 0.25 exactly
    const RadialProblem pb = default_problem(0.5);
    CHECK(pb.k_tilde() == doctest::Approx(0.25).epsilon(1e-15));

    BasisSet m4;
    m4.powers = {1, 2, 3, 4};
    m4.exponents = {0.8, 0.8, 0.8, 0.8};
    RadialProblem pb_beta1 = pb;
    pb_beta1.beta = 1.0;
    pb_beta1.beta_tracks_k = false;
    const ElementTable t = assemble_elements(pb_beta1, m4);
    CHECK(std::abs(t.sc - t.cs - 0.25) < 1e-8);
    // independent rule agrees
    CHECK(std::abs(antisymmetry_gap_oracle(pb_beta1) - 0.25) < 1e-10);
}

TEST_CASE("antisymmetry holds for every potential and basis size") {
    for (const char* kind : {"square-well", "exponential"}) {
        for (int m : {0, 4, 8}) {
            RadialProblem pb = default_problem(0.4);
            pb.potential = make_potential(kind, 1.0, 1.0);
            BasisSet basis;
            const BasisSet def = BasisSet::default_m8();
            for (int i = 0; i < m; ++i) {
                basis.powers.push_back(def.powers[i]);
                basis.exponents.push_back(def.exponents[i]);
            }
            const ElementTable t = assemble_elements(pb, basis);
            CHECK(t.antisymmetry_defect / t.k_tilde < 1e-8);
        }
    }
}

TEST_CASE("chi block is symmetric exactly as stored") {
    const ElementTable t = assemble_elements(default_problem(0.5), BasisSet::default_m8());
    for (int i = 0; i < t.m; ++i)
        for (int j = 0; j < t.m; ++j) CHECK(t.chi(i, j) == t.chi(j, i));
}

TEST_CASE("integrals are invariant under r_max growth") {
    RadialProblem pb = default_problem(0.5);
    const ElementTable t40 = assemble_elements(pb, BasisSet::default_m8());
    pb.r_max = 50.0;
    const ElementTable t50 = assemble_elements(pb, BasisSet::default_m8());
    double scale = std::abs(t40.cc);
    for (double v : t40.chi_chi) scale = std::max(scale, std::abs(v));
    CHECK(std::abs(t40.ss - t50.ss) / scale < 1e-10);
    CHECK(std::abs(t40.sc - t50.sc) / scale < 1e-10);
    CHECK(std::abs(t40.cc - t50.cc) / scale < 1e-10);
    for (int i = 0; i < t40.m; ++i)
        CHECK(std::abs(t40.c_chi[i] - t50.c_chi[i]) / scale < 1e-10);
}

TEST_CASE("invalid problems and bases are rejected") {
    RadialProblem pb = default_problem(0.5);
    pb.k = -1.0;
    CHECK_THROWS_AS(pb.validate(), std::invalid_argument);

    // exponential tail not decayed at r_max
    RadialProblem tail = default_problem(0.5);
    tail.potential = make_potential("exponential", 1.0, 3.0);
    tail.r_max = 40.0;  // needs ~83 for a 1e-12 tail at range 3
    CHECK_THROWS_AS(tail.validate(), std::invalid_argument);

    BasisSet dup;
    dup.powers = {1, 1};
    dup.exponents = {0.8, 0.8};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    BasisSet bad_power;
    bad_power.powers = {0};
    bad_power.exponents = {0.8};
    CHECK_THROWS_AS(bad_power.validate(), std::invalid_argument);

    BasisSet bad_exp;
    bad_exp.powers = {1};
    bad_exp.exponents = {-0.5};
    CHECK_THROWS_AS(bad_exp.validate(), std::invalid_argument);
}

TEST_CASE("unresolvable truncation raises an assembly error with the defect") {
    // a cutoff this soft has not saturated by r_max, so the antisymmetry
    // defect is a truncation artifact no quadrature refinement can fix
    RadialProblem pb = default_problem(0.5);
    pb.beta = 0.05;
    pb.beta_tracks_k = false;
    try {
        assemble_elements(pb, BasisSet::default_m8());
        FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
        CHECK(e.defect() > 1e-8 * pb.k_tilde());
    }
}

TEST_CASE("quadrature convergence is reported") {
    const ElementTable t = assemble_elements(default_problem(0.5), BasisSet::default_m8());
    CHECK(t.convergence_estimate < 1e-10);
    CHECK(t.antisymmetry_defect < 1e-12);
}
