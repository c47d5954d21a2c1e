#include "kohnlab/scanner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

#include <json.hpp>

#include "kohnlab/kohn_complex.hpp"
#include "kohnlab/kohn_real.hpp"
#include "kohnlab/lmatrix.hpp"

namespace kohnlab {

const std::set<std::string>& ScanSpec::known_checks() {
    static const std::set<std::string> names{"theta",   "gamma_sq", "equivalence", "lmatrix",
                                             "flatness", "desnanot", "slope_fd"};
    return names;
}

void ScanSpec::validate() const {
    if (!(k_min > 0)) throw std::invalid_argument("scan k_min must be positive");
    if (!(k_max >= k_min)) throw std::invalid_argument("scan k range is empty");
    if (k_count < 2) throw std::invalid_argument("scan k_count must be >= 2");
    if (tau_count < 2) throw std::invalid_argument("scan tau_count must be >= 2");
    if (jobs < 1) throw std::invalid_argument("scan jobs must be >= 1");
    for (const auto& c : checks)
        if (!known_checks().count(c)) throw std::invalid_argument("unknown scan check: " + c);
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ScanRow scan_one(double k, const ScanSpec& spec, const RadialProblem& tmpl,
                 const BasisSet& basis) {
    ScanRow row;
    row.k = k;
    const bool all = spec.checks.empty();
    auto enabled = [&](const char* name) { return all || spec.checks.count(name) > 0; };
    try {
        RadialProblem pb = tmpl;
        pb.k = k;
        if (pb.beta_tracks_k) pb.beta = k + 1.0;
        const ElementTable table = assemble_elements(pb, basis);
        const DetCoefficients co = extract_det_coefficients(table);
        row.gamma = co.gamma;

        const TauAnalysis opt = optimize_tau(co);
        row.degenerate_flag = to_string(opt.degeneracy);
        if (opt.degeneracy != Degeneracy::None) {
            // eta' is still defined; report it at tau = 0
            const ComplexSolution c = solve_complex(table, 0.0, OpenChannelForm::KMatrix);
            row.re_eta_c = c.eta_v.real();
            row.im_eta_c = c.eta_v.imag();
        }
        if (opt.degeneracy == Degeneracy::None) {
            row.tau0 = opt.tau0;
            row.tau1 = opt.tau1;
            row.eta0 = opt.eta0;
            row.eta1 = opt.eta1;
            row.slope_at_tau0 = opt.slope_at_tau0;
            row.singular_tau_count = static_cast<int>(opt.singular_taus.size());
            for (std::size_t i = 0; i < opt.singular_taus.size(); ++i) {
                if (i) row.classifications += ';';
                row.classifications += to_string(opt.singular_taus[i].classification);
            }

            const EquivalenceReport eq = equivalence_check(table, spec.seed);
            row.re_eta_c = eq.eta_complex.real();
            row.im_eta_c = eq.eta_complex.imag();
            row.re_match_defect = eq.re_match_defect;
            row.im_formula_defect = eq.im_formula_defect;
            if (enabled("flatness"))
                row.check_residuals.emplace_back("flatness", eq.tau_flatness);
            if (enabled("equivalence"))
                row.check_residuals.emplace_back("equivalence", eq.re_match_defect);

            if (enabled("theta")) {
                std::vector<double> taus;
                for (int i = 0; i < spec.tau_count; ++i)
                    taus.push_back((i + 0.5) * M_PI / spec.tau_count);
                row.check_residuals.emplace_back(
                    "theta", theta_invariance_check(table, taus).relative_spread);
            }
            if (enabled("gamma_sq")) {
                const double g2 = (co.at - co.gamma) * (co.at - co.gamma + co.b) + co.a * co.c;
                row.check_residuals.emplace_back(
                    "gamma_sq", std::abs(g2 - co.gamma * co.gamma) /
                                    std::max(co.gamma * co.gamma, 1e-300));
            }
            if (enabled("slope_fd")) {
                // spot check at one interior angle, full grid lives in the suites
                const double tau = 0.5 * (opt.tau0 + opt.tau1);
                const double h = 1e-4;
                const DetCoefficients& c2 = co;
                const double em = eta_via_determinants(c2, tau - h);
                const double ep = eta_via_determinants(c2, tau + h);
                double d = wrap_phase(ep - em);
                row.check_residuals.emplace_back(
                    "slope_fd", std::abs(d / (2 * h) - slope(c2, tau)) /
                                    std::max(std::abs(slope(c2, tau)), 1e-300));
            }
            if (enabled("lmatrix")) {
                const LDecomposition dec = decompose(table);
                for (int f : dec.pole_flags) {
                    if (!row.pole_flags.empty()) row.pole_flags += ';';
                    row.pole_flags += std::to_string(f);
                }
                row.check_residuals.emplace_back(
                    "lmatrix", correspondence_check(dec, co).max_defect);
            }
            if (enabled("desnanot")) {
                std::mt19937_64 rng(spec.seed ^ 0x5a5a5a5aULL);
                std::uniform_real_distribution<double> uni(-1.0, 1.0);
                Mat<double> x(5, 5);
                for (int i = 0; i < 5; ++i)
                    for (int j = i; j < 5; ++j) x(i, j) = x(j, i) = uni(rng);
                row.check_residuals.emplace_back("desnanot",
                                                 desnanot_jacobi_check(x, 1, 1, 3, 3));
            }
        }
    } catch (const std::exception& e) {
        row.failed = true;
        row.message = e.what();
    }
    return row;
}

}  // namespace

std::vector<ScanRow> run_scan(const ScanSpec& spec, const RadialProblem& problem_template,
                              const BasisSet& basis) {
    spec.validate();
    std::vector<double> ks(spec.k_count);
    for (int i = 0; i < spec.k_count; ++i)
        ks[i] = spec.k_count == 1
                    ? spec.k_min
                    : spec.k_min + (spec.k_max - spec.k_min) * i / (spec.k_count - 1);

    std::vector<ScanRow> rows(ks.size());
    if (spec.jobs <= 1) {
        for (std::size_t i = 0; i < ks.size(); ++i)
            rows[i] = scan_one(ks[i], spec, problem_template, basis);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int jobs = std::min<int>(spec.jobs, static_cast<int>(ks.size()));
    for (int t = 0; t < jobs; ++t)
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < ks.size(); i = next.fetch_add(1))
                rows[i] = scan_one(ks[i], spec, problem_template, basis);
        });
    for (auto& w : workers) w.join();
    return rows;
}

void write_csv(const std::vector<ScanRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "k,tau0,tau1,eta0,eta1,slope_at_tau0,gamma,re_eta_c,im_eta_c,re_match_defect,"
           "im_formula_defect,singular_tau_count,classifications,degenerate_flag,pole_flags\n";
    for (const auto& r : rows) {
        out << fmt_double(r.k) << ',' << fmt_double(r.tau0) << ',' << fmt_double(r.tau1) << ','
            << fmt_double(r.eta0) << ',' << fmt_double(r.eta1) << ','
            << fmt_double(r.slope_at_tau0) << ',' << fmt_double(r.gamma) << ','
            << fmt_double(r.re_eta_c) << ',' << fmt_double(r.im_eta_c) << ','
            << fmt_double(r.re_match_defect) << ',' << fmt_double(r.im_formula_defect) << ','
            << r.singular_tau_count << ',' << r.classifications << ',' << r.degenerate_flag
            << ',' << r.pole_flags << '\n';
    }
}

void write_json_report(const std::vector<ScanRow>& rows, const ScanSpec& spec,
                       const RadialProblem& problem_template, const BasisSet& basis,
                       const std::string& path) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["problem"] = {{"potential",
                       {{"kind", to_string(problem_template.potential.kind)},
                        {"V0", problem_template.potential.v0},
                        {"a", problem_template.potential.a}}},
                      {"N", problem_template.normalization},
                      {"beta", problem_template.beta_tracks_k
                                   ? nlohmann::ordered_json("k + 1")
                                   : nlohmann::ordered_json(problem_template.beta)},
                      {"r_max", problem_template.r_max},
                      {"n_quad", problem_template.n_quad}};
    doc["basis"] = {{"M", basis.size()}, {"powers", basis.powers}, {"exponents", basis.exponents}};
    doc["scan"] = {{"k_min", spec.k_min},
                   {"k_max", spec.k_max},
                   {"count", spec.k_count},
                   {"tau_count", spec.tau_count},
                   {"seed", spec.seed}};
    auto& jrows = doc["rows"] = nlohmann::ordered_json::array();
    double worst_re = 0, worst_im = 0;
    std::vector<double> failed_k;
    for (const auto& r : rows) {
        nlohmann::ordered_json jr;
        jr["k"] = r.k;
        jr["failed"] = r.failed;
        if (r.failed) {
            jr["message"] = r.message;
            failed_k.push_back(r.k);
        } else {
            jr["tau0"] = r.tau0;
            jr["tau1"] = r.tau1;
            jr["eta0"] = r.eta0;
            jr["eta1"] = r.eta1;
            jr["slope_at_tau0"] = r.slope_at_tau0;
            jr["gamma"] = r.gamma;
            jr["eta_complex"] = {r.re_eta_c, r.im_eta_c};
            jr["re_match_defect"] = r.re_match_defect;
            jr["im_formula_defect"] = r.im_formula_defect;
            jr["singular_tau_count"] = r.singular_tau_count;
            jr["classifications"] = r.classifications;
            jr["degenerate_flag"] = r.degenerate_flag;
            jr["pole_flags"] = r.pole_flags;
            for (const auto& [name, value] : r.check_residuals) jr["checks"][name] = value;
            worst_re = std::max(worst_re, r.re_match_defect);
            worst_im = std::max(worst_im, r.im_formula_defect);
        }
        jrows.push_back(std::move(jr));
    }
    doc["summary"] = {{"worst_re_match_defect", worst_re},
                      {"worst_im_formula_defect", worst_im},
                      {"failed_k", failed_k}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

}  // namespace kohnlab
