#include "kohnlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace kohnlab {

double Potential::operator()(double r) const {
    switch (kind) {
        case PotentialKind::SquareWell:
            return r < a ? -v0 : 0.0;
        case PotentialKind::Exponential:
            return -v0 * std::exp(-r / a);
        case PotentialKind::Zero:
            return 0.0;
    }
    return 0.0;
}

double Potential::support_radius(double tail) const {
    switch (kind) {
        case PotentialKind::SquareWell:
            return a;
        case PotentialKind::Exponential:
            return a * std::log(1.0 / tail);
        case PotentialKind::Zero:
            return 0.0;
    }
    return 0.0;
}

std::vector<double> Potential::breakpoints() const {
    if (kind == PotentialKind::SquareWell) return {a};
    return {};
}

Potential make_potential(const std::string& kind, double v0, double a) {
    Potential p;
    p.v0 = v0;
    p.a = a;
    if (kind == "square-well")
        p.kind = PotentialKind::SquareWell;
    else if (kind == "exponential")
        p.kind = PotentialKind::Exponential;
    else if (kind == "zero")
        p.kind = PotentialKind::Zero;
    else
        throw std::invalid_argument("unknown potential kind: " + kind);
    return p;
}

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::SquareWell: return "square-well";
        case PotentialKind::Exponential: return "exponential";
        case PotentialKind::Zero: return "zero";
    }
    return "?";
}

void RadialProblem::validate() const {
    if (!(k > 0)) throw std::invalid_argument("wavenumber k must be positive");
    if (!(normalization > 0)) throw std::invalid_argument("normalization N must be positive");
    if (!(beta > 0)) throw std::invalid_argument("cutoff steepness beta must be positive");
    if (!(r_max > 0)) throw std::invalid_argument("r_max must be positive");
    if (n_quad < 16) throw std::invalid_argument("n_quad too small (need at least 16)");
    if (potential.kind != PotentialKind::Zero) {
        if (!(potential.v0 > 0)) throw std::invalid_argument("potential V0 must be positive");
        if (!(potential.a > 0)) throw std::invalid_argument("potential range a must be positive");
        if (potential.support_radius(1e-12) > r_max)
            throw std::invalid_argument("potential has not decayed below 1e-12 of its peak at r_max");
    }
}

RadialProblem default_problem(double k) {
    RadialProblem p;
    p.k = k;
    p.beta = k + 1.0;
    return p;
}

void BasisSet::validate() const {
    if (powers.size() != exponents.size())
        throw std::invalid_argument("basis powers/exponents length mismatch");
    std::set<std::pair<int, long long>> seen;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (powers[i] < 1) throw std::invalid_argument("basis power n_i must be >= 1");
        if (!(exponents[i] > 0))
            throw std::invalid_argument("basis exponent alpha_i must be positive");
        // exact-duplicate detection on the binary representation
        const auto key = std::make_pair(powers[i], static_cast<long long>(exponents[i] * (1LL << 40)));
        if (!seen.insert(key).second)
            throw std::invalid_argument("basis (n_i, alpha_i) pairs must be pairwise distinct");
    }
}

BasisSet BasisSet::default_m8() {
    BasisSet b;
    for (double alpha : {0.8, 1.6})
        for (int n : {1, 2, 3, 4}) {
            b.powers.push_back(n);
            b.exponents.push_back(alpha);
        }
    return b;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

struct Integrands {
    // value of S, C, (H-E)S, (H-E)C, chi_i, (H-E)chi_i at node r
    double s, c, hes, hec;
    std::vector<double> chi, hechi;
};

Integrands eval_at(const RadialProblem& pb, const BasisSet& basis, double r) {
    Integrands z;
    const double k = pb.k, n0 = pb.normalization, beta = pb.beta;
    const double v = pb.potential(r);
    const double sk = std::sin(k * r), ck = std::cos(k * r);
    const double cut = 1.0 - std::exp(-beta * r);
    z.s = n0 * sk;
    z.c = n0 * ck * cut;
    // -1/2 S'' = (k^2/2) S exactly, so the residual of S is V S
    z.hes = v * z.s;
    // residual of C: the cutoff contributes N e^{-beta r}(k beta sin + beta^2/2 cos)
    z.hec = n0 * std::exp(-beta * r) * (k * beta * sk + 0.5 * beta * beta * ck) + v * z.c;
    const int m = basis.size();
    z.chi.resize(m);
    z.hechi.resize(m);
    for (int i = 0; i < m; ++i) {
        const int n = basis.powers[i];
        const double al = basis.exponents[i];
        const double e = std::exp(-al * r);
        const double rn = std::pow(r, n);
        z.chi[i] = rn * e;
        const double d2 = e * (n * (n - 1) * std::pow(r, n - 2) - 2.0 * n * al * std::pow(r, n - 1) +
                               al * al * rn);
        z.hechi[i] = -0.5 * d2 + (v - pb.energy()) * z.chi[i];
    }
    return z;
}

ElementTable assemble_with_rule(const RadialProblem& pb, const BasisSet& basis,
                                const QuadratureRule& rule) {
    const int m = basis.size();
    ElementTable t;
    t.m = m;
    t.k = pb.k;
    t.k_tilde = pb.k_tilde();
    t.s_chi.assign(m, 0.0);
    t.c_chi.assign(m, 0.0);
    t.chi_chi.assign(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> chi_hes(m, 0.0), chi_hec(m, 0.0);
    std::vector<double> upper(static_cast<std::size_t>(m) * m, 0.0);

    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double w = rule.weights[q];
        const Integrands z = eval_at(pb, basis, rule.nodes[q]);
        t.ss += w * z.s * z.hes;
        t.sc += w * z.s * z.hec;
        t.cs += w * z.c * z.hes;
        t.cc += w * z.c * z.hec;
        for (int i = 0; i < m; ++i) {
            chi_hes[i] += w * z.chi[i] * z.hes;
            chi_hec[i] += w * z.chi[i] * z.hec;
            for (int j = i; j < m; ++j)
                upper[static_cast<std::size_t>(i) * m + j] += w * z.chi[i] * z.hechi[j];
        }
    }
    // <S,chi_i> = <chi_i,S> evaluated with (H-E) applied to the free function,
    // which keeps zero-potential rows exactly zero
    t.s_chi = chi_hes;
    t.c_chi = chi_hec;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const double v = upper[static_cast<std::size_t>(i) * m + j];
            t.chi_chi[static_cast<std::size_t>(i) * m + j] = v;
            t.chi_chi[static_cast<std::size_t>(j) * m + i] = v;
        }
    t.antisymmetry_defect = std::abs(t.sc - t.cs - t.k_tilde);
    return t;
}

double max_rel_change(const ElementTable& a, const ElementTable& b) {
    double scale = std::abs(b.k_tilde);
    auto upd_scale = [&scale](double v) { scale = std::max(scale, std::abs(v)); };
    upd_scale(b.ss);
    upd_scale(b.sc);
    upd_scale(b.cs);
    upd_scale(b.cc);
    for (double v : b.c_chi) upd_scale(v);
    for (double v : b.chi_chi) upd_scale(v);

    double worst = 0.0;
    auto cmp = [&](double x, double y) { worst = std::max(worst, std::abs(x - y) / scale); };
    cmp(a.ss, b.ss);
    cmp(a.sc, b.sc);
    cmp(a.cs, b.cs);
    cmp(a.cc, b.cc);
    for (std::size_t i = 0; i < a.s_chi.size(); ++i) {
        cmp(a.s_chi[i], b.s_chi[i]);
        cmp(a.c_chi[i], b.c_chi[i]);
    }
    for (std::size_t i = 0; i < a.chi_chi.size(); ++i) cmp(a.chi_chi[i], b.chi_chi[i]);
    return worst;
}

}  // namespace

QuadratureRule build_rule(const RadialProblem& problem, int n_target) {
    constexpr int pts_per_panel = 16;
    std::vector<double> edges{0.0};
    for (double b : problem.potential.breakpoints())
        if (b > 0.0 && b < problem.r_max) edges.push_back(b);
    edges.push_back(problem.r_max);
    std::sort(edges.begin(), edges.end());

    const int total_panels = std::max(2, (n_target + pts_per_panel - 1) / pts_per_panel);
    std::vector<double> gx, gw;
    gauss_legendre(pts_per_panel, gx, gw);

    QuadratureRule rule;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double lo = edges[s], hi = edges[s + 1];
        const int panels =
            std::max(1, static_cast<int>(std::lround(total_panels * (hi - lo) / problem.r_max)));
        const double h = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = lo + (p + 0.5) * h, half = 0.5 * h;
            for (int i = 0; i < pts_per_panel; ++i) {
                rule.nodes.push_back(mid + half * gx[i]);
                rule.weights.push_back(half * gw[i]);
            }
        }
    }
    return rule;
}

ElementTable assemble_elements(const RadialProblem& problem, const BasisSet& basis) {
    problem.validate();
    basis.validate();

    constexpr int refine_cap = 3;
    constexpr double rel_tol = 1e-10;
    const double antisym_tol = 1e-8 * problem.k_tilde();

    int n = problem.n_quad;
    ElementTable coarse = assemble_with_rule(problem, basis, build_rule(problem, n));
    double change = 0.0;
    for (int attempt = 0; attempt <= refine_cap; ++attempt) {
        n *= 2;
        ElementTable fine = assemble_with_rule(problem, basis, build_rule(problem, n));
        change = max_rel_change(coarse, fine);
        if (change < rel_tol && fine.antisymmetry_defect <= antisym_tol) {
            fine.convergence_estimate = change;
            return fine;
        }
        coarse = fine;
    }
    throw AssemblyError("quadrature did not converge: antisymmetry defect " +
                            std::to_string(coarse.antisymmetry_defect) + " (tolerance " +
                            std::to_string(antisym_tol) + "), last refinement change " +
                            std::to_string(change),
                        coarse.antisymmetry_defect);
}

}  // namespace kohnlab
