#include "kohnlab/lmatrix.hpp"

#include <cmath>

#include "kohnlab/kohn_real.hpp"

namespace kohnlab {

namespace detail {

QL::QL(const ElementTable& t) : table(t) {
    const int m = t.m;
    QMat x(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) x(i, j) = table.chi(i, j);
    QMat vecs;
    jacobi_eigensym(std::move(x), mu, vecs);
    sd.assign(m, 0);
    cd.assign(m, 0);
    for (int f = 0; f < m; ++f)
        for (int i = 0; i < m; ++i) {
            sd[f] += vecs(i, f) * table.s_chi[i];
            cd[f] += vecs(i, f) * table.c_chi[i];
        }
    for (int f = 0; f < m; ++f) f_product *= mu[f];
}

std::array<qreal, 4> QL::fold(qreal tau) const {
    const QRotated r = qrotate(table, tau);
    const qreal c = qcos(tau), s = qsin(tau);
    std::array<qreal, 4> out{r.ss, r.sc, r.cs, r.cc};
    for (std::size_t f = 0; f < mu.size(); ++f) {
        const qreal sdf = c * sd[f] + s * cd[f];
        const qreal cdf = -s * sd[f] + c * cd[f];
        out[0] -= sdf * sdf / mu[f];
        out[1] -= sdf * cdf / mu[f];
        out[2] -= cdf * sdf / mu[f];
        out[3] -= cdf * cdf / mu[f];
    }
    return out;
}

}  // namespace detail

LDecomposition decompose(const ElementTable& table) {
    auto ql = std::make_shared<detail::QL>(table);
    LDecomposition out;
    out.engine = ql;
    out.k = table.k;
    out.energy = 0.5 * table.k * table.k;
    out.wronskian = table.wronskian();
    const int m = table.m;
    out.mu.resize(m);
    out.e_f.resize(m);
    out.s_coupling.resize(m);
    out.c_coupling.resize(m);
    qreal max_ef = 0;
    for (int f = 0; f < m; ++f) {
        out.mu[f] = to_double(ql->mu[f]);
        out.e_f[f] = out.mu[f] + out.energy;
        out.s_coupling[f] = to_double(ql->sd[f]);
        out.c_coupling[f] = to_double(ql->cd[f]);
        max_ef = qmax(max_ef, qabs(qreal(out.e_f[f])));
    }
    out.eps_pole = to_double(1e-6Q * max_ef);
    for (int f = 0; f < m; ++f)
        if (std::abs(out.mu[f]) < out.eps_pole) out.pole_flags.push_back(f);

    const auto l0 = ql->fold(0);
    out.l = {to_double(l0[0]), to_double(l0[1]), to_double(l0[2]), to_double(l0[3])};
    out.f_product = to_double(ql->f_product);
    out.det_l = to_double(l0[0] * l0[3] - l0[1] * l0[2]);
    return out;
}

double eta_via_L(const LDecomposition& dec, double tau) {
    const auto lt = dec.engine->fold(tau);
    const qreal scale = qabs(lt[0]) + qabs(lt[1]) + qabs(lt[2]) + qabs(lt[3]);
    if (qabs(lt[3]) <= 1e-12Q * scale)
        throw SingularSystemError("folded open-channel matrix has L22(tau) = 0 at tau = " +
                                      std::to_string(tau),
                                  to_double(lt[3]), 0.0);
    const qreal det_l = lt[0] * lt[3] - lt[1] * lt[2];
    const qreal kw = dec.engine->table.kw;
    const qreal tanv = -lt[2] / lt[3] - det_l / (kw * lt[3]);
    return to_double(detail::qwrap_phase(qreal(tau) + qatan(tanv)));
}

CorrespondenceReport correspondence_check(const LDecomposition& dec,
                                          const DetCoefficients& coeffs) {
    CorrespondenceReport rep;
    rep.pole_proximate = !dec.pole_flags.empty();
    const auto l0 = dec.engine->fold(0);
    const qreal f = dec.engine->f_product;
    const qreal kw = dec.engine->table.kw;
    const qreal det_l = l0[0] * l0[3] - l0[1] * l0[2];
    const qreal scale = qreal(coeffs.scale);
    auto rel = [&](qreal lhs, qreal rhs) {
        return to_double(qabs(lhs - rhs) / qmax(scale * 1e-8Q, qmax(qabs(lhs), qabs(rhs))));
    };
    rep.a_defect = rel(coeffs.a, f * l0[0]);
    rep.c_defect = rel(coeffs.c, f * l0[3]);
    rep.b_defect = rel(coeffs.b, -f * (l0[1] + l0[2]));
    rep.at_defect = rel(coeffs.at, f * l0[1]);
    rep.wron_defect = rel(qreal(2) * coeffs.at + coeffs.b, f * kw);
    rep.gamma_defect = rel(coeffs.gamma, f * det_l / kw);
    rep.max_defect = std::max({rep.a_defect, rep.c_defect, rep.b_defect, rep.at_defect,
                               rep.wron_defect, rep.gamma_defect});
    return rep;
}

}  // namespace kohnlab
