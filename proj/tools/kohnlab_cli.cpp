// kohnlab command-line tool: solve / scan / verify.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 mathematical
// degeneracy or singularity (so scripts can tell physics from misuse).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "kohnlab/config.hpp"
#include "kohnlab/kohn_complex.hpp"
#include "kohnlab/kohn_real.hpp"
#include "kohnlab/scanner.hpp"
#include "kohnlab/verify.hpp"

namespace {

unsigned seed_from_env() {
    if (const char* s = std::getenv("KOHNLAB_SEED")) return static_cast<unsigned>(std::atoll(s));
    return 0x6b6f686e;
}

int cmd_solve(const kohnlab::Config& cfg, double k, bool has_tau, double tau) {
    using namespace kohnlab;
    RadialProblem pb = cfg.problem;
    pb.k = k;
    if (pb.beta_tracks_k) pb.beta = k + 1.0;

    const ElementTable table = assemble_elements(pb, cfg.basis);
    const DetCoefficients co = extract_det_coefficients(table);
    std::printf("k          = %.17g\n", k);
    std::printf("wronskian  = %.17g (defect %.3e)\n", table.wronskian(),
                table.antisymmetry_defect);
    std::printf("gamma      = %.17g\n", co.gamma);

    const TauAnalysis opt = optimize_tau(co);
    int exit_code = 0;
    double tau_used = has_tau ? tau : 0.0;
    if (opt.degeneracy == Degeneracy::None) {
        if (!has_tau) tau_used = opt.tau0;
        std::printf("tau0, tau1 = %.17g, %.17g\n", opt.tau0, opt.tau1);
        std::printf("slope(tau0)= %.17g\n", opt.slope_at_tau0);
    } else {
        std::printf("degenerate = %s (tau optimization not applicable)\n",
                    to_string(opt.degeneracy).c_str());
        exit_code = 2;
    }

    const double eta = eta_via_determinants(co, tau_used);
    std::printf("tau        = %.17g\n", tau_used);
    std::printf("eta_v      = %.17g\n", eta);
    std::printf("slope(tau) = %.17g\n", slope(co, tau_used));

    const ComplexSolution cs = solve_complex(table, tau_used, OpenChannelForm::KMatrix);
    std::printf("eta_c      = %.17g %+.17gi\n", cs.eta_v.real(), cs.eta_v.imag());

    if (opt.degeneracy == Degeneracy::None) {
        const EquivalenceReport eq = equivalence_check(table, seed_from_env());
        std::printf("re_match_defect   = %.3e\n", eq.re_match_defect);
        std::printf("im_formula_defect = %.3e%s\n", eq.im_formula_defect,
                    eq.slope_exceeds_unity ? " (slope >= 1, raw defect)" : "");
        std::printf("tau_flatness      = %.3e\n", eq.tau_flatness);
    }
    for (const auto& s : opt.singular_taus)
        std::printf("singular tau %.12g: %s (f^2/gamma^2 = %.3e)\n", s.tau,
                    to_string(s.classification).c_str(), s.ratio);
    return exit_code;
}

int cmd_scan(const kohnlab::Config& cfg) {
    using namespace kohnlab;
    ScanSpec spec = cfg.scan;
    spec.seed = seed_from_env();
    const auto rows = run_scan(spec, cfg.problem, cfg.basis);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string csv = cfg.out_dir + "/" + cfg.csv_name;
    const std::string jsn = cfg.out_dir + "/" + cfg.json_name;
    write_csv(rows, csv);
    write_json_report(rows, spec, cfg.problem, cfg.basis, jsn);

    double worst_re = 0, worst_im = 0;
    std::string singular_ks;
    int failures = 0;
    for (const auto& r : rows) {
        if (r.failed) {
            ++failures;
            std::printf("k = %.6g FAILED: %s\n", r.k, r.message.c_str());
            continue;
        }
        worst_re = std::max(worst_re, r.re_match_defect);
        worst_im = std::max(worst_im, r.im_formula_defect);
        if (r.singular_tau_count > 0) {
            if (!singular_ks.empty()) singular_ks += ", ";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", r.k);
            singular_ks += buf;
        }
    }
    std::printf("wrote %s and %s\n", csv.c_str(), jsn.c_str());
    std::printf("rows: %zu (%d failed)\n", rows.size(), failures);
    std::printf("worst re-match defect:   %.3e\n", worst_re);
    std::printf("worst im-formula defect: %.3e\n", worst_im);
    if (!singular_ks.empty())
        std::printf("singular tau values present at k = %s\n", singular_ks.c_str());
    return failures == 0 ? 0 : 2;
}

int cmd_verify(const kohnlab::Config& cfg) {
    using namespace kohnlab;
    VerifyOptions opt = cfg.verify;
    opt.seed = seed_from_env();
    const auto names = cfg.verify_suites.empty() ? suite_names() : cfg.verify_suites;
    bool all_ok = true;
    for (const auto& name : names) {
        const SuiteResult r = run_suite(name, opt);
        const char* tag = r.status == SuiteResult::Status::Pass   ? "PASS"
                          : r.status == SuiteResult::Status::Skip ? "SKIP"
                                                                  : "FAIL";
        std::printf("[%s] %-14s worst %.3e (tol %.1e)%s%s\n", tag, r.name.c_str(), r.worst,
                    r.tolerance, r.detail.empty() ? "" : "  -- ", r.detail.c_str());
        all_ok = all_ok && r.ok();
    }
    return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-channel Kohn variational scattering workbench"};
    app.require_subcommand(1);

    std::string config_path;
    double k = -1.0, tau = -1.0;
    std::string out_dir;
    std::string suites_csv;
    int jobs = 0;

    app.add_option("--config", config_path, "JSON configuration file");

    auto* solve = app.add_subcommand("solve", "phase shift at one wavenumber");
    solve->add_option("--k", k, "wavenumber (overrides config)");
    solve->add_option("--tau", tau, "mixing phase in [0, pi); defaults to the slope minimizer");

    auto* scan = app.add_subcommand("scan", "sweep the wavenumber grid, write CSV + JSON");
    scan->add_option("--out", out_dir, "output directory (overrides config)");
    scan->add_option("--jobs", jobs, "parallel workers");

    auto* verify = app.add_subcommand("verify", "run the named verification suites");
    verify->add_option("--suites", suites_csv, "comma-separated suite list (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        kohnlab::Config cfg =
            config_path.empty() ? kohnlab::default_config() : kohnlab::load_config(config_path);

        if (solve->parsed()) {
            const double kk = k > 0 ? k : cfg.problem.k;
            const bool has_tau = tau >= 0.0;
            if (has_tau && !(tau < M_PI)) {
                std::fprintf(stderr, "error: tau must lie in [0, pi)\n");
                return 1;
            }
            return cmd_solve(cfg, kk, has_tau, tau);
        }
        if (scan->parsed()) {
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (jobs > 0) cfg.scan.jobs = jobs;
            return cmd_scan(cfg);
        }
        if (verify->parsed()) {
            if (!suites_csv.empty()) {
                cfg.verify_suites.clear();
                std::string token;
                for (char c : suites_csv + ",") {
                    if (c == ',') {
                        if (!token.empty()) cfg.verify_suites.push_back(token);
                        token.clear();
                    } else {
                        token += c;
                    }
                }
            }
            return cmd_verify(cfg);
        }
    } catch (const kohnlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const kohnlab::SingularSystemError& e) {
        std::fprintf(stderr, "singular system: %s\n", e.what());
        return 2;
    } catch (const kohnlab::DegenerateError& e) {
        std::fprintf(stderr, "degenerate case: %s\n", e.what());
        return 2;
    } catch (const kohnlab::AssemblyError& e) {
        std::fprintf(stderr, "assembly error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
