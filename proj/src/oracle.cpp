#include "kohnlab/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "kohnlab/kohn_real.hpp"

namespace kohnlab {

namespace {

// integrate u'' = (2V - k^2) u across [0, match] with the classic 4-stage
// scheme, segment edges pinned to potential discontinuities; V is sampled
// from within the active segment so the wall of a square well never leaks
struct State {
    double u, du;
};

State integrate(const RadialProblem& pb, double match_radius, int n_steps) {
    const double k = pb.k;
    std::vector<double> edges{0.0};
    for (double b : pb.potential.breakpoints())
        if (b > 0.0 && b < match_radius) edges.push_back(b);
    edges.push_back(match_radius);

    State y{0.0, 1.0};
    const double h_target = match_radius / n_steps;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double lo = edges[s], hi = edges[s + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h_target)));
        const double h = (hi - lo) / n;
        const double inside = std::nextafter(hi, lo);
        auto rhs = [&](double r, const State& q) -> State {
            const double v = pb.potential(std::min(r, inside));
            return {q.du, (2.0 * v - k * k) * q.u};
        };
        for (int i = 0; i < n; ++i) {
            const double r = lo + i * h;
            const State k1 = rhs(r, y);
            const State k2 = rhs(r + 0.5 * h, {y.u + 0.5 * h * k1.u, y.du + 0.5 * h * k1.du});
            const State k3 = rhs(r + 0.5 * h, {y.u + 0.5 * h * k2.u, y.du + 0.5 * h * k2.du});
            const State k4 = rhs(r + h, {y.u + h * k3.u, y.du + h * k3.du});
            y.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
            y.du += h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
        }
    }
    return y;
}

double eta_from_state(const RadialProblem& pb, const State& y, double r) {
    // u ~ A sin(kr + eta) outside the potential
    return wrap_phase(std::atan2(pb.k * y.u, y.du) - pb.k * r);
}

}  // namespace

OracleResult exact_phase_shift(const RadialProblem& problem, double match_radius, int n_steps) {
    problem.validate();
    double rm = match_radius;
    if (rm <= 0.0) {
        switch (problem.potential.kind) {
            case PotentialKind::SquareWell: rm = problem.potential.a + 2.0; break;
            case PotentialKind::Exponential: rm = problem.potential.support_radius(1e-12); break;
            case PotentialKind::Zero: rm = 1.0; break;
        }
    }
    if (problem.potential.kind != PotentialKind::Zero &&
        rm < problem.potential.support_radius(1e-10))
        throw std::invalid_argument("match radius lies inside the potential support");

    const double eta_h = eta_from_state(problem, integrate(problem, rm, n_steps), rm);
    const double eta_h2 = eta_from_state(problem, integrate(problem, rm, 2 * n_steps), rm);
    OracleResult out;
    out.match_radius = rm;
    out.step = rm / n_steps;
    // one step of Richardson extrapolation on the fourth-order result;
    // the difference is taken modulo pi since both values are wrapped
    const double diff = wrap_phase(eta_h2 - eta_h);
    out.richardson_error_estimate = std::abs(diff) / 15.0;
    out.eta_exact = wrap_phase(eta_h2 + diff / 15.0);
    return out;
}

double square_well_phase_shift(double k, double v0, double a) {
    const double kappa = std::sqrt(k * k + 2.0 * v0);
    return wrap_phase(std::atan(k / kappa * std::tan(kappa * a)) - k * a);
}

double born_phase_shift(const RadialProblem& problem) {
    const QuadratureRule rule = build_rule(problem, 4096);
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = std::sin(problem.k * rule.nodes[i]);
        integral += rule.weights[i] * problem.potential(rule.nodes[i]) * s * s;
    }
    return wrap_phase(std::atan(-2.0 / problem.k * integral));
}

namespace {

qreal det2(qreal a, qreal b, qreal c, qreal d) { return a * d - b * c; }

qreal det3(const qreal m[3][3]) {
    return m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2]) -
           m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2]) +
           m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
}

struct SmallSystem {
    int n = 0;            // M + 1
    qreal a[3][3] = {};   // Kohn matrix
    qreal b[3] = {};      // right-hand side
    qreal ss = 0, sc = 0; // rotated values needed for the functional
    std::vector<qreal> s_chi;
};

SmallSystem small_system(const detail::QTable& t, qreal tau) {
    const detail::QRotated r = detail::qrotate(t, tau);
    SmallSystem s;
    s.n = t.m + 1;
    s.ss = r.ss;
    s.sc = r.sc;
    s.s_chi = r.s_chi;
    s.a[0][0] = r.cc;
    s.b[0] = r.cs;
    for (int j = 0; j < t.m; ++j) {
        s.a[0][j + 1] = r.c_chi[j];
        s.a[j + 1][0] = r.c_chi[j];
        s.b[j + 1] = r.s_chi[j];
        for (int i = 0; i < t.m; ++i) s.a[i + 1][j + 1] = t.chi(i, j);
    }
    return s;
}

qreal small_det(const SmallSystem& s) {
    if (s.n == 1) return s.a[0][0];
    if (s.n == 2) return det2(s.a[0][0], s.a[0][1], s.a[1][0], s.a[1][1]);
    return det3(s.a);
}

qreal small_det_mod(SmallSystem s, int col) {
    for (int i = 0; i < s.n; ++i) s.a[i][col] = -s.b[i];
    return small_det(s);
}

}  // namespace

BruteForceResult brute_force_small_m(const ElementTable& table, double tau) {
    if (table.m > 2) throw std::domain_error("explicit cofactor route only covers M <= 2");
    const detail::QTable qt(table);

    auto det_at = [&](qreal t) { return small_det(small_system(qt, t)); };
    auto det_mod_at = [&](qreal t) { return small_det_mod(small_system(qt, t), 0); };

    BruteForceResult out;
    const qreal c = det_at(0);
    const qreal a = det_at(QPI / 2);
    const qreal b = 2 * det_at(QPI / 4) - a - c;
    const qreal at = det_mod_at(QPI / 2);
    out.a = to_double(a);
    out.b = to_double(b);
    out.c = to_double(c);
    out.at = to_double(at);

    // theta by Cramer at the better-conditioned of the two sample angles
    const qreal t_theta = qabs(det_at(0)) > qabs(det_at(QPI / 2)) ? 0 : QPI / 2;
    SmallSystem s = small_system(qt, t_theta);
    const qreal det = small_det(s);
    qreal iv = s.ss;
    {
        const qreal a_t = small_det_mod(s, 0) / det;
        iv += a_t * s.sc;
        for (int j = 1; j < s.n; ++j) iv += small_det_mod(s, j) / det * s.s_chi[j - 1];
    }
    const qreal theta = det * iv;
    out.theta = to_double(theta);
    const qreal gamma = theta / qt.kw;
    out.gamma = to_double(gamma);
    const qreal den = 2 * at + b;
    out.gamma_quotient = to_double(((at + b) * at + a * c) / den);
    const qreal d = (at * at - a * c) / den;
    out.d = to_double(d);

    // determinant-only phase estimate at the requested tau
    const qreal sn = qsin(qreal(tau)), cn = qcos(qreal(tau));
    const qreal g = a * sn * sn + b * sn * cn + c * cn * cn;
    const qreal num = (a - c) * sn * cn + b * cn * cn + d;
    out.eta_v = to_double(detail::qwrap_phase(qreal(tau) + qatan(num / g)));

    // explicit-inverse linear-system route at the same tau
    SmallSystem st = small_system(qt, qreal(tau));
    const qreal dt = small_det(st);
    const qreal a_t = small_det_mod(st, 0) / dt;
    out.a_t = to_double(a_t);
    qreal iv2 = st.ss + a_t * st.sc;
    out.p.resize(table.m);
    for (int j = 1; j < st.n; ++j) {
        const qreal pj = small_det_mod(st, j) / dt;
        out.p[j - 1] = to_double(pj);
        iv2 += pj * st.s_chi[j - 1];
    }
    out.eta_solve = to_double(detail::qwrap_phase(qreal(tau) + qatan(a_t - iv2 / qt.kw)));
    return out;
}

}  // namespace kohnlab
