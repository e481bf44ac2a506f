#include "core/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace causalbench {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

double need_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

int need_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    return v.get<int>();
}

std::vector<double> need_number_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(need_number(e, where + " element"));
    return out;
}

void parse_cohort_spec(const json& obj, CohortSpec& spec) {
    static const std::set<std::string> known = {
        "n_patients", "n_a", "n_b", "n_c", "n_d", "covariate_prevalence",
        "q_weights", "s_weights", "outcome_intercept", "treat_intercept",
        "treat_a_weights", "treat_c_weights", "noise_sd"};
    if (!obj.is_object()) throw ConfigError("cohort_spec must be an object");
    reject_unknown_keys(obj, known, "cohort_spec");

    if (obj.contains("n_patients")) spec.n_patients = need_int(obj["n_patients"], "n_patients");
    if (obj.contains("n_a")) spec.n_a = need_int(obj["n_a"], "n_a");
    if (obj.contains("n_b")) spec.n_b = need_int(obj["n_b"], "n_b");
    if (obj.contains("n_c")) spec.n_c = need_int(obj["n_c"], "n_c");
    if (obj.contains("n_d")) spec.n_d = need_int(obj["n_d"], "n_d");

    // Prevalence accepts a scalar (broadcast to every covariate) or a full
    // per-covariate array; resize happens after the counts are final.
    if (obj.contains("covariate_prevalence")) {
        const json& v = obj["covariate_prevalence"];
        if (v.is_number()) {
            spec.covariate_prevalence.assign(1, v.get<double>());
        } else {
            spec.covariate_prevalence = need_number_array(v, "covariate_prevalence");
        }
    }
    if (obj.contains("q_weights")) spec.q_weights = need_number_array(obj["q_weights"], "q_weights");
    if (obj.contains("s_weights")) spec.s_weights = need_number_array(obj["s_weights"], "s_weights");
    if (obj.contains("outcome_intercept")) spec.outcome_intercept = need_number(obj["outcome_intercept"], "outcome_intercept");
    if (obj.contains("treat_intercept")) spec.treat_intercept = need_number(obj["treat_intercept"], "treat_intercept");
    if (obj.contains("treat_a_weights")) spec.treat_a_weights = need_number_array(obj["treat_a_weights"], "treat_a_weights");
    if (obj.contains("treat_c_weights")) spec.treat_c_weights = need_number_array(obj["treat_c_weights"], "treat_c_weights");
    if (obj.contains("noise_sd")) spec.noise_sd = need_number(obj["noise_sd"], "noise_sd");

    if (spec.covariate_prevalence.size() == 1) {
        spec.covariate_prevalence.assign(static_cast<std::size_t>(spec.n_covariates()),
                                         spec.covariate_prevalence[0]);
    }
}

void parse_match_spec(const json& obj, MatchSpec& spec) {
    static const std::set<std::string> known = {"caliper_multiplier", "distance_scale",
                                                "order_policy"};
    if (!obj.is_object()) throw ConfigError("match_spec must be an object");
    reject_unknown_keys(obj, known, "match_spec");

    if (obj.contains("caliper_multiplier")) {
        spec.caliper_multiplier = need_number(obj["caliper_multiplier"], "caliper_multiplier");
    }
    if (obj.contains("distance_scale")) {
        const json& v = obj["distance_scale"];
        if (!v.is_string() || v.get<std::string>() != "logit_ps_sd") {
            throw ConfigError("distance_scale must be \"logit_ps_sd\"");
        }
        spec.distance_scale = DistanceScale::logit_ps_sd;
    }
    if (obj.contains("order_policy")) {
        const json& v = obj["order_policy"];
        if (!v.is_string()) throw ConfigError("order_policy must be a string");
        const std::string s = v.get<std::string>();
        if (s == "descending_ps") spec.order_policy = OrderPolicy::descending_ps;
        else if (s == "data_order") spec.order_policy = OrderPolicy::data_order;
        else if (s == "random") spec.order_policy = OrderPolicy::random;
        else throw ConfigError("order_policy must be one of descending_ps, data_order, random");
    }
}

const char* order_policy_name(OrderPolicy policy) {
    switch (policy) {
        case OrderPolicy::descending_ps: return "descending_ps";
        case OrderPolicy::data_order: return "data_order";
        case OrderPolicy::random: return "random";
    }
    return "descending_ps";
}

}  // namespace

std::vector<double> default_effect_grid() {
    std::vector<double> grid;
    grid.reserve(50);
    for (int i = 1; i <= 50; ++i) grid.push_back(i / 10.0);
    return grid;
}

RunConfig RunConfig::defaults() {
    RunConfig config;
    config.cohort_spec = CohortSpec::defaults();
    config.effect_grid = default_effect_grid();
    return config;
}

void RunConfig::validate() const {
    cohort_spec.validate();
    match_spec.validate();
    if (effect_grid.empty()) throw ConfigError("effect_grid must be non-empty");
    for (double r : effect_grid) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw ConfigError("effect_grid entries must be finite and nonnegative");
        }
    }
    if (reps_per_block < 1) throw ConfigError("reps_per_block must be >= 1");
    if (parallelism < 0) throw ConfigError("parallelism must be >= 0 (0 = auto)");
    if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");
}

RunConfig parse_config_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    static const std::set<std::string> known = {
        "cohort_spec", "match_spec", "effect_grid", "reps_per_block",
        "base_seed", "parallelism", "output_dir"};
    reject_unknown_keys(doc, known, "config root");

    RunConfig config = RunConfig::defaults();
    if (doc.contains("cohort_spec")) parse_cohort_spec(doc["cohort_spec"], config.cohort_spec);
    if (doc.contains("match_spec")) parse_match_spec(doc["match_spec"], config.match_spec);
    if (doc.contains("effect_grid")) {
        config.effect_grid = need_number_array(doc["effect_grid"], "effect_grid");
    }
    if (doc.contains("reps_per_block")) {
        config.reps_per_block = need_int(doc["reps_per_block"], "reps_per_block");
    }
    if (doc.contains("base_seed")) {
        const json& v = doc["base_seed"];
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
            throw ConfigError("base_seed must be an integer");
        }
        config.base_seed = v.get<std::uint64_t>();
    }
    if (doc.contains("parallelism")) {
        const json& v = doc["parallelism"];
        if (v.is_string()) {
            if (v.get<std::string>() != "auto") {
                throw ConfigError("parallelism must be a worker count or \"auto\"");
            }
            config.parallelism = 0;
        } else {
            config.parallelism = need_int(v, "parallelism");
        }
    }
    if (doc.contains("output_dir")) {
        const json& v = doc["output_dir"];
        if (!v.is_string()) throw ConfigError("output_dir must be a string");
        config.output_dir = v.get<std::string>();
    }
    config.validate();
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_to_json(const RunConfig& config) {
    const CohortSpec& cs = config.cohort_spec;
    json doc;
    doc["cohort_spec"] = {
        {"n_patients", cs.n_patients},
        {"n_a", cs.n_a},
        {"n_b", cs.n_b},
        {"n_c", cs.n_c},
        {"n_d", cs.n_d},
        {"covariate_prevalence", cs.covariate_prevalence},
        {"q_weights", cs.q_weights},
        {"s_weights", cs.s_weights},
        {"outcome_intercept", cs.outcome_intercept},
        {"treat_intercept", cs.treat_intercept},
        {"treat_a_weights", cs.treat_a_weights},
        {"treat_c_weights", cs.treat_c_weights},
        {"noise_sd", cs.noise_sd},
    };
    doc["match_spec"] = {
        {"caliper_multiplier", config.match_spec.caliper_multiplier},
        {"distance_scale", "logit_ps_sd"},
        {"order_policy", order_policy_name(config.match_spec.order_policy)},
    };
    doc["effect_grid"] = config.effect_grid;
    doc["reps_per_block"] = config.reps_per_block;
    doc["base_seed"] = config.base_seed;
    if (config.parallelism == 0) {
        doc["parallelism"] = "auto";
    } else {
        doc["parallelism"] = config.parallelism;
    }
    doc["output_dir"] = config.output_dir;
    return doc.dump(2) + "\n";
}

}  // namespace causalbench
