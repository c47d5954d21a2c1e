#include "kohnlab/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace kohnlab {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key at " + where + "/" + it.key());
}

double need_positive(const json& v, const std::string& where) {
    const double d = v.get<double>();
    if (!(d > 0)) throw ConfigError("value at " + where + " must be positive");
    return d;
}

}  // namespace

Config default_config() {
    Config cfg;
    cfg.problem = default_problem(0.5);
    return cfg;
}

Config parse_config(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(origin + ": top level must be an object");

    Config cfg = default_config();
    reject_unknown(doc, {"potential", "k", "N", "beta", "r_max", "n_quad", "basis", "scan",
                         "verify", "output"},
                   origin);

    if (doc.contains("potential")) {
        const json& p = doc["potential"];
        reject_unknown(p, {"kind", "V0", "a"}, origin + "/potential");
        const std::string kind = p.value("kind", "square-well");
        const double v0 = p.value("V0", 1.0);
        const double a = p.value("a", 1.0);
        cfg.problem.potential = make_potential(kind, v0, a);
    }
    if (doc.contains("k")) cfg.problem.k = need_positive(doc["k"], origin + "/k");
    if (doc.contains("N"))
        cfg.problem.normalization = need_positive(doc["N"], origin + "/N");
    if (doc.contains("beta")) {
        cfg.problem.beta = need_positive(doc["beta"], origin + "/beta");
        cfg.problem.beta_tracks_k = false;
    } else {
        cfg.problem.beta = cfg.problem.k + 1.0;
        cfg.problem.beta_tracks_k = true;
    }
    if (doc.contains("r_max")) cfg.problem.r_max = need_positive(doc["r_max"], origin + "/r_max");
    if (doc.contains("n_quad")) cfg.problem.n_quad = doc["n_quad"].get<int>();

    if (doc.contains("basis")) {
        const json& b = doc["basis"];
        reject_unknown(b, {"M", "powers", "exponents"}, origin + "/basis");
        BasisSet basis;
        if (b.contains("powers")) basis.powers = b["powers"].get<std::vector<int>>();
        if (b.contains("exponents"))
            basis.exponents = b["exponents"].get<std::vector<double>>();
        if (b.contains("M")) {
            const int m = b["M"].get<int>();
            if (m < 0) throw ConfigError("basis M must be >= 0 at " + origin + "/basis/M");
            if (basis.powers.empty() && m > 0) {
                // truncation / extension of the default family
                const BasisSet def = BasisSet::default_m8();
                for (int i = 0; i < m; ++i) {
                    basis.powers.push_back(def.powers[i % def.size()]);
                    basis.exponents.push_back(def.exponents[i % def.size()]);
                }
            }
            if (static_cast<int>(basis.powers.size()) != m)
                throw ConfigError("basis M disagrees with powers length at " + origin +
                                  "/basis");
        }
        basis.validate();
        cfg.basis = basis;
    }

    if (doc.contains("scan")) {
        const json& s = doc["scan"];
        reject_unknown(s, {"k_min", "k_max", "count", "tau_count", "checks", "jobs"},
                       origin + "/scan");
        if (s.contains("k_min")) cfg.scan.k_min = need_positive(s["k_min"], origin + "/scan/k_min");
        if (s.contains("k_max")) cfg.scan.k_max = need_positive(s["k_max"], origin + "/scan/k_max");
        if (s.contains("count")) cfg.scan.k_count = s["count"].get<int>();
        if (s.contains("tau_count")) cfg.scan.tau_count = s["tau_count"].get<int>();
        if (s.contains("jobs")) cfg.scan.jobs = s["jobs"].get<int>();
        if (s.contains("checks"))
            for (const auto& c : s["checks"]) {
                const std::string name = c.get<std::string>();
                if (!ScanSpec::known_checks().count(name))
                    throw ConfigError("unknown check '" + name + "' at " + origin +
                                      "/scan/checks");
                cfg.scan.checks.insert(name);
            }
    }

    if (doc.contains("verify")) {
        const json& v = doc["verify"];
        reject_unknown(v, {"suites", "tolerances"}, origin + "/verify");
        if (v.contains("suites"))
            for (const auto& s : v["suites"]) {
                const std::string name = s.get<std::string>();
                if (name == "all") continue;
                bool known = false;
                for (const auto& sn : suite_names()) known = known || sn == name;
                if (!known)
                    throw ConfigError("unknown suite '" + name + "' at " + origin +
                                      "/verify/suites");
                cfg.verify_suites.push_back(name);
            }
        if (v.contains("tolerances")) {
            const json& t = v["tolerances"];
            const std::map<std::string, double*> knobs{
                {"antisymmetry", &cfg.verify.tol_antisymmetry},
                {"theta_spread", &cfg.verify.tol_theta_spread},
                {"gamma_sq", &cfg.verify.tol_gamma_sq},
                {"desnanot", &cfg.verify.tol_desnanot},
                {"route", &cfg.verify.tol_route},
                {"slope_fd", &cfg.verify.tol_slope_fd},
                {"tau_separation", &cfg.verify.tol_tau_separation},
                {"eta_separation", &cfg.verify.tol_eta_separation},
                {"extremal_value", &cfg.verify.tol_extremal_value},
                {"flatness", &cfg.verify.tol_flatness},
                {"circle", &cfg.verify.tol_circle},
                {"re_match", &cfg.verify.tol_re_match},
                {"im_formula", &cfg.verify.tol_im_formula},
                {"variant", &cfg.verify.tol_variant},
                {"tan_forms", &cfg.verify.tol_tan_forms},
                {"lmatrix", &cfg.verify.tol_lmatrix},
                {"det_l", &cfg.verify.tol_det_l},
                {"oracle", &cfg.verify.tol_oracle},
                {"oracle_analytic", &cfg.verify.tol_oracle_analytic},
            };
            for (auto it = t.begin(); it != t.end(); ++it) {
                const auto knob = knobs.find(it.key());
                if (knob == knobs.end())
                    throw ConfigError("unknown tolerance at " + origin + "/verify/tolerances/" +
                                      it.key());
                *knob->second = need_positive(it.value(),
                                              origin + "/verify/tolerances/" + it.key());
            }
        }
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown(o, {"dir", "csv", "json"}, origin + "/output");
        if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
        if (o.contains("csv")) cfg.csv_name = o["csv"].get<std::string>();
        if (o.contains("json")) cfg.json_name = o["json"].get<std::string>();
    }

    cfg.verify.problem_template = cfg.problem;
    cfg.verify.basis = cfg.basis;
    cfg.problem.validate();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace kohnlab
