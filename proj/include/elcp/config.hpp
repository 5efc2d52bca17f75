#pragma once

// Experiment config files for the `simulate` subcommand. JSON of the form
//
//   { "output": "table.csv",
//     "experiments": [ { "n": 200, "k": 100, "p": 5, "error": "gaussian",
//                        "M": 2000, "seed": 42, ... } ] }
//
// Unknown keys are rejected.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elcp/errors.hpp"
#include "elcp/simlab.hpp"

namespace elcp {

struct ExperimentEntry {
    ExperimentSpec spec;
    bool calibrate = false;           // also report the empirical critical value
    std::optional<int> calibrate_k;   // calibrate at a different change-point
    int calibration_M = 10000;
};

struct SimulateConfig {
    std::string output;
    std::vector<ExperimentEntry> experiments;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                                const std::string& context) {
    std::string bad;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) bad += (bad.empty() ? "" : ", ") + it.key();
    if (!bad.empty()) throw ConfigError(context + ": unknown keys: " + bad);
}

inline void require_keys(const json& obj, const std::vector<std::string>& required,
                         const std::string& context) {
    std::string missing;
    for (const auto& key : required)
        if (!obj.contains(key)) missing += (missing.empty() ? "" : ", ") + key;
    if (!missing.empty()) throw ConfigError(context + ": missing keys: " + missing);
}

inline ErrorLaw parse_error_law(const std::string& s) {
    if (s == "gaussian" || s == "gauss" || s == "normal") return ErrorLaw::kGaussian;
    if (s == "exponential" || s == "exp") return ErrorLaw::kCenteredExponential;
    throw ConfigError("error law must be 'gaussian' or 'exponential', got '" + s + "'");
}

inline Eigen::VectorXd parse_vector(const json& arr, const std::string& context) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError(context + ": expected a non-empty array of numbers");
    Eigen::VectorXd v(arr.size());
    Eigen::Index i = 0;
    for (const auto& e : arr) {
        if (!e.is_number()) throw ConfigError(context + ": expected numbers");
        v[i++] = e.get<double>();
    }
    return v;
}

inline Alternative parse_alternative(const json& j, const std::string& context) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "none") return Alternative::none();
        if (s == "one_minus_beta0") return Alternative::one_minus_beta0();
        throw ConfigError(context + ": alternative must be 'none', 'one_minus_beta0', "
                          "{\"sparse\": [[index, offset], ...]} or {\"explicit\": [...]}");
    }
    if (j.is_object()) {
        reject_unknown_keys(j, {"sparse", "explicit"}, context + ".alternative");
        if (j.contains("sparse")) {
            std::vector<std::pair<int, double>> entries;
            for (const auto& e : j["sparse"]) {
                if (!e.is_array() || e.size() != 2)
                    throw ConfigError(context + ": sparse entries are [index, offset] pairs");
                entries.emplace_back(e[0].get<int>(), e[1].get<double>());
            }
            return Alternative::sparse_shift(std::move(entries));
        }
        if (j.contains("explicit"))
            return Alternative::explicit_beta2(parse_vector(j["explicit"], context));
    }
    throw ConfigError(context + ": malformed alternative");
}

inline ExperimentEntry parse_experiment(const json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected an object");
    reject_unknown_keys(j,
                        {"n", "k", "p", "error", "M", "seed", "alpha", "critical",
                         "alternative", "beta0", "estimate_beta", "convention", "calibrate",
                         "calibrate_k", "calibration_M"},
                        context);
    require_keys(j, {"n", "k", "p", "error", "M", "seed"}, context);

    ExperimentEntry e;
    e.spec.n = j["n"].get<int>();
    e.spec.k = j["k"].get<int>();
    e.spec.p = j["p"].get<int>();
    e.spec.error_law = parse_error_law(j["error"].get<std::string>());
    e.spec.replications = j["M"].get<int>();
    e.spec.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("alpha")) e.spec.alpha = j["alpha"].get<double>();
    if (j.contains("critical")) {
        const auto& c = j["critical"];
        if (c.is_string()) {
            if (c.get<std::string>() != "normal")
                throw ConfigError(context + ": critical must be 'normal' or a number");
        } else if (c.is_number()) {
            e.spec.fixed_critical = c.get<double>();
        } else {
            throw ConfigError(context + ": critical must be 'normal' or a number");
        }
    }
    if (j.contains("alternative"))
        e.spec.alternative = parse_alternative(j["alternative"], context);
    if (j.contains("beta0")) {
        const auto& b = j["beta0"];
        if (b.is_string()) {
            if (b.get<std::string>() != "sequence")
                throw ConfigError(context + ": beta0 must be 'sequence' or an array");
        } else {
            e.spec.beta0 = parse_vector(b, context + ".beta0");
        }
    }
    if (j.contains("estimate_beta")) e.spec.estimate_beta = j["estimate_beta"].get<bool>();
    if (j.contains("convention")) {
        const auto s = j["convention"].get<std::string>();
        if (s == "proof_consistent")
            e.spec.convention = SigmaConvention::kProofConsistent;
        else if (s == "theorem_text")
            e.spec.convention = SigmaConvention::kTheoremText;
        else
            throw ConfigError(context + ": convention must be 'proof_consistent' or 'theorem_text'");
    }
    if (j.contains("calibrate")) e.calibrate = j["calibrate"].get<bool>();
    if (j.contains("calibrate_k")) {
        e.calibrate_k = j["calibrate_k"].get<int>();
        e.calibrate = true;
    }
    if (j.contains("calibration_M")) e.calibration_M = j["calibration_M"].get<int>();
    return e;
}

}  // namespace detail

inline SimulateConfig parse_simulate_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown_keys(j, {"output", "experiments"}, "config");
    detail::require_keys(j, {"output", "experiments"}, "config");
    SimulateConfig cfg;
    cfg.output = j["output"].get<std::string>();
    if (!j["experiments"].is_array() || j["experiments"].empty())
        throw ConfigError("config: 'experiments' must be a non-empty array");
    int idx = 0;
    for (const auto& e : j["experiments"])
        cfg.experiments.push_back(
            detail::parse_experiment(e, "experiments[" + std::to_string(idx++) + "]"));
    return cfg;
}

}  // namespace elcp
