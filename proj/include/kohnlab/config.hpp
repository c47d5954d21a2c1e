#pragma once

// JSON configuration shared by every subcommand. Unknown keys are rejected
// with their path; tolerances must be positive. Flags override config keys.
//
// {
//   "potential": {"kind": "square-well", "V0": 1.0, "a": 1.0},
//   "k": 0.5, "N": 1.0, "beta": 1.5, "r_max": 40.0, "n_quad": 512,
//   "basis":  {"M": 8, "powers": [...], "exponents": [...]},
//   "scan":   {"k_min": 0.1, "k_max": 1.0, "count": 10, "tau_count": 16,
//              "checks": [...], "jobs": 1},
//   "verify": {"suites": [...], "tolerances": {"<suite knob>": ...}},
//   "output": {"dir": ".", "csv": "scan.csv", "json": "scan.json"}
// }
//
// "beta" is optional; when omitted it tracks k as beta = k + 1.

#include "kohnlab/model.hpp"
#include "kohnlab/scanner.hpp"
#include "kohnlab/verify.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace kohnlab {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Config {
    RadialProblem problem;  // includes defaults when keys are absent
    BasisSet basis = BasisSet::default_m8();
    ScanSpec scan;
    std::vector<std::string> verify_suites;  // empty = all
    VerifyOptions verify;                    // tolerances, possibly overridden
    std::string out_dir = ".";
    std::string csv_name = "scan.csv";
    std::string json_name = "scan.json";
};

// Built-in defaults (square well V0 = 1, a = 1, default basis, k = 0.5).
Config default_config();

// Parses a config file; throws ConfigError naming the offending key path.
Config load_config(const std::string& path);
Config parse_config(const std::string& text, const std::string& origin = "<config>");

}  // namespace kohnlab
