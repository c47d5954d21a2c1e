#include <doctest.h>

#include "kohnlab/config.hpp"

using namespace kohnlab;

TEST_CASE("defaults parse and validate") {
    const Config cfg = parse_config("{}");
    CHECK(cfg.problem.k == 0.5);
    CHECK(cfg.problem.beta_tracks_k);
    CHECK(cfg.basis.size() == 8);
}

TEST_CASE("full config round trip") {
    const char* text = R"({
        "potential": {"kind": "exponential", "V0": 0.5, "a": 1.0},
        "k": 0.3, "N": 2.0, "beta": 1.25, "r_max": 45.0, "n_quad": 256,
        "basis": {"M": 4, "powers": [1,2,3,4], "exponents": [0.9,0.9,1.1,1.1]},
        "scan": {"k_min": 0.2, "k_max": 0.8, "count": 5, "tau_count": 8,
                 "checks": ["theta", "gamma_sq"], "jobs": 2},
        "verify": {"suites": ["theta", "routes"], "tolerances": {"route": 1e-8}},
        "output": {"dir": "out", "csv": "rows.csv", "json": "rows.json"}
    })";
    const Config cfg = parse_config(text);
    CHECK(cfg.problem.potential.kind == PotentialKind::Exponential);
    CHECK(cfg.problem.k == 0.3);
    CHECK(cfg.problem.normalization == 2.0);
    CHECK(cfg.problem.beta == 1.25);
    CHECK(!cfg.problem.beta_tracks_k);
    CHECK(cfg.basis.size() == 4);
    CHECK(cfg.scan.k_count == 5);
    CHECK(cfg.scan.checks.count("theta") == 1);
    CHECK(cfg.verify_suites.size() == 2);
    CHECK(cfg.verify.tol_route == 1e-8);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_config(R"({"scan": {"k_mim": 0.1}})", "cfg.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cfg.json/scan/k_mim") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"potentail": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"verify": {"tolerances": {"nope": 1e-9}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"verify": {"suites": ["bogus"]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scan": {"checks": ["bogus"]}})"), ConfigError);
}

TEST_CASE("tolerances must be positive") {
    CHECK_THROWS_AS(parse_config(R"({"verify": {"tolerances": {"route": 0.0}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"verify": {"tolerances": {"route": -1e-9}}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"k": -0.5})"), ConfigError);
}

TEST_CASE("basis block consistency") {
    CHECK_THROWS_AS(parse_config(R"({"basis": {"M": 3, "powers": [1,2], "exponents": [1,1]}})"),
                    ConfigError);
    // M alone truncates the default family
    const Config cfg = parse_config(R"({"basis": {"M": 4}})");
    CHECK(cfg.basis.size() == 4);
    CHECK_THROWS_AS(parse_config(R"({"basis": {"powers": [1,1], "exponents": [0.8,0.8]}})"),
                    std::invalid_argument);
}

TEST_CASE("malformed json names the origin") {
    try {
        parse_config("{oops", "bad.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
    }
}
