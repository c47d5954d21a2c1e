#pragma once

// Batch exploration: sweep the wavenumber grid, run the full per-k pipeline
// (assembly, coefficients, tau optimization, complex solve, equivalence
// defects, singularity census), and emit CSV plus a versioned JSON report.
// A failure at one k is recorded in its row and never poisons the others.

#include "kohnlab/model.hpp"

#include <set>
#include <string>
#include <vector>

namespace kohnlab {

struct ScanSpec {
    double k_min = 0.1;
    double k_max = 1.0;
    int k_count = 10;
    int tau_count = 16;
    std::set<std::string> checks;  // subset of known_checks(); empty = all
    int jobs = 1;
    unsigned seed = 0x6b6f686e;

    void validate() const;
    static const std::set<std::string>& known_checks();
};

struct ScanRow {
    double k = 0;
    double tau0 = 0, tau1 = 0;
    double eta0 = 0, eta1 = 0;
    double slope_at_tau0 = 0;
    double gamma = 0;
    double re_eta_c = 0, im_eta_c = 0;
    double re_match_defect = 0, im_formula_defect = 0;
    int singular_tau_count = 0;
    std::string classifications;  // semicolon-joined, ordered by tau
    std::string degenerate_flag = "none";
    std::string pole_flags;       // semicolon-joined closed-block indices
    bool failed = false;
    std::string message;

    // residuals filled per enabled check, keyed by check name
    std::vector<std::pair<std::string, double>> check_residuals;
};

std::vector<ScanRow> run_scan(const ScanSpec& spec, const RadialProblem& problem_template,
                              const BasisSet& basis);

// header is exactly the row field names, one row per k, '%.17g' doubles
void write_csv(const std::vector<ScanRow>& rows, const std::string& path);
void write_json_report(const std::vector<ScanRow>& rows, const ScanSpec& spec,
                       const RadialProblem& problem_template, const BasisSet& basis,
                       const std::string& path);

}  // namespace kohnlab
