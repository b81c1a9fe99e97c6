#pragma once

// Scenario files (YAML, or JSON since it parses as YAML):
//
//   treatment: N5_HighCost
//   params: {kappa: 0}              # replaces single fields of the preset
//   policy:
//     effort:
//       preset: estimated              # the treatment's fitted coefficients
//       noise_sd: 0.5               # explicit fields override the preset
//       initial: {kind: uniform}    # default | constant (with value) | uniform
//     links:
//       rule: rank_top              # best_response | benefit_threshold | rank_top | logistic | fixed
//       k: 3
//   agents:                         # per-agent overrides, same keys as policy
//     - {id: 2, links: {rule: fixed, targets: [1]}}
//   periods: 30
//   replications: 10
//   seed: 7
//   output: runs/n5
//
// Logistic rules take `preset: link_benefit | table8` and/or a `coefficients` map
// with keys intercept, lagged_link, own_effort, partner_effort, above_median,
// below_median (log-odds).

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqnet/dynamics.hpp"
#include "lqnet/errors.hpp"
#include "lqnet/treatments.hpp"

namespace lqnet {

struct ScenarioConfig {
    std::string treatment;  // empty when params are fully explicit
    GameParams params;
    std::vector<AgentPolicy> policies;
    int periods = 30;
    int replications = 1;
    std::uint64_t seed = 0;
    std::string output;
};

namespace detail {

template <class T>
T yaml_as(const YAML::Node& node, const std::string& path) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ParseError(path + ": wrong type");
    }
}

inline void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed, const std::string& path) {
    if (!node.IsMap()) throw ParseError(path + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParseError((path.empty() ? "" : path + ".") + key + ": unknown field");
    }
}

inline std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

inline GameParams yaml_params(const YAML::Node& node, GameParams base) {
    check_keys(node, {"theta", "beta", "lambda", "kappa", "n", "effort_min", "effort_max"}, "params");
    if (node["theta"]) base.theta = yaml_as<double>(node["theta"], "params.theta");
    if (node["beta"]) base.beta = yaml_as<double>(node["beta"], "params.beta");
    if (node["lambda"]) base.lambda = yaml_as<double>(node["lambda"], "params.lambda");
    if (node["kappa"]) base.kappa = yaml_as<double>(node["kappa"], "params.kappa");
    if (node["n"]) base.n = yaml_as<int>(node["n"], "params.n");
    if (node["effort_min"]) base.effort_min = yaml_as<double>(node["effort_min"], "params.effort_min");
    if (node["effort_max"]) base.effort_max = yaml_as<double>(node["effort_max"], "params.effort_max");
    return base;
}

inline EffortRule yaml_effort(const YAML::Node& node, EffortRule rule, const std::string& treatment,
                              const std::string& path) {
    check_keys(node, {"preset", "b0", "b1", "b2", "noise_sd", "initial"}, path);
    if (node["preset"]) {
        const auto preset = yaml_as<std::string>(node["preset"], join(path, "preset"));
        if (preset == "estimated") {
            if (treatment.empty()) throw ParseError(join(path, "preset") + ": estimated needs a treatment");
            const EffortRule p = estimated_effort_rule(treatment);
            rule.b0 = p.b0;
            rule.b1 = p.b1;
            rule.b2 = p.b2;
        } else if (preset == "best_response") {
            rule.b0 = 0.0;
            rule.b1 = 1.0;
            rule.b2 = 0.0;
        } else {
            throw ParseError(join(path, "preset") + ": unknown preset '" + preset + "'");
        }
    }
    if (node["b0"]) rule.b0 = yaml_as<double>(node["b0"], join(path, "b0"));
    if (node["b1"]) rule.b1 = yaml_as<double>(node["b1"], join(path, "b1"));
    if (node["b2"]) rule.b2 = yaml_as<double>(node["b2"], join(path, "b2"));
    if (node["noise_sd"]) rule.noise_sd = yaml_as<double>(node["noise_sd"], join(path, "noise_sd"));
    if (const auto init = node["initial"]) {
        const std::string ip = join(path, "initial");
        check_keys(init, {"kind", "value"}, ip);
        const auto kind = yaml_as<std::string>(init["kind"], join(ip, "kind"));
        if (kind == "default") rule.initial.kind = InitialEffortKind::ParamDefault;
        else if (kind == "constant") rule.initial.kind = InitialEffortKind::Constant;
        else if (kind == "uniform") rule.initial.kind = InitialEffortKind::Uniform;
        else throw ParseError(join(ip, "kind") + ": expected default, constant or uniform");
        if (rule.initial.kind == InitialEffortKind::Constant) {
            if (!init["value"]) throw ParseError(join(ip, "value") + ": missing");
            rule.initial.value = yaml_as<double>(init["value"], join(ip, "value"));
        }
    }
    try {
        rule.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
    return rule;
}

inline LinkRule yaml_links(const YAML::Node& node, LinkRule rule, const GameParams& params,
                           const std::string& treatment, const std::string& path) {
    check_keys(node, {"rule", "k", "preset", "coefficients", "targets"}, path);
    if (node["rule"]) {
        const auto r = yaml_as<std::string>(node["rule"], join(path, "rule"));
        if (r == "best_response") rule.kind = LinkRuleKind::BestResponseLinks;
        else if (r == "benefit_threshold") rule.kind = LinkRuleKind::BenefitThreshold;
        else if (r == "rank_top") rule.kind = LinkRuleKind::RankTop;
        else if (r == "logistic") rule.kind = LinkRuleKind::LogisticChoice;
        else if (r == "fixed") rule.kind = LinkRuleKind::Fixed;
        else throw ParseError(join(path, "rule") + ": unknown rule '" + r + "'");
    }
    if (rule.kind == LinkRuleKind::RankTop) {
        if (!node["k"]) throw ParseError(join(path, "k") + ": missing for rank_top");
        rule.rank_k = yaml_as<int>(node["k"], join(path, "k"));
        if (rule.rank_k < 0 || rule.rank_k > params.n - 1)
            throw InvalidArgument(join(path, "k") + ": must be in [0, " + std::to_string(params.n - 1) + "]");
    }
    if (node["preset"]) {
        const auto preset = yaml_as<std::string>(node["preset"], join(path, "preset"));
        if (preset == "link_benefit") rule.logit = link_benefit_logit(params);
        else if (preset == "relative_position") rule.logit = relative_position_logit(params, treatment);
        else throw ParseError(join(path, "preset") + ": unknown preset '" + preset + "'");
    }
    if (const auto c = node["coefficients"]) {
        const std::string cp = join(path, "coefficients");
        check_keys(c, {"intercept", "lagged_link", "own_effort", "partner_effort", "above_median", "below_median"}, cp);
        auto& l = rule.logit;
        if (c["intercept"]) l.intercept = yaml_as<double>(c["intercept"], join(cp, "intercept"));
        if (c["lagged_link"]) l.lagged_link = yaml_as<double>(c["lagged_link"], join(cp, "lagged_link"));
        if (c["own_effort"]) l.own_effort = yaml_as<double>(c["own_effort"], join(cp, "own_effort"));
        if (c["partner_effort"]) l.partner_effort = yaml_as<double>(c["partner_effort"], join(cp, "partner_effort"));
        if (c["above_median"]) l.above_median = yaml_as<double>(c["above_median"], join(cp, "above_median"));
        if (c["below_median"]) l.below_median = yaml_as<double>(c["below_median"], join(cp, "below_median"));
    }
    if (const auto t = node["targets"]) {
        const std::string tp = join(path, "targets");
        if (!t.IsSequence()) throw ParseError(tp + ": expected a list of agent ids");
        rule.fixed_targets = 0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const int id = yaml_as<int>(t[k], tp + "[" + std::to_string(k) + "]");
            if (id < 1 || id > params.n) throw InvalidArgument(tp + ": agent id " + std::to_string(id) + " out of range");
            rule.fixed_targets |= bit(id - 1);
        }
    }
    return rule;
}

inline AgentPolicy yaml_policy(const YAML::Node& node, AgentPolicy base, const GameParams& params,
                               const std::string& treatment, const std::string& path,
                               std::initializer_list<std::string_view> extra = {}) {
    if (!node.IsMap()) throw ParseError(path + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (key != "effort" && key != "links" && std::find(extra.begin(), extra.end(), key) == extra.end())
            throw ParseError(join(path, key.c_str()) + ": unknown field");
    }
    if (node["effort"]) base.effort = yaml_effort(node["effort"], base.effort, treatment, join(path, "effort"));
    if (node["links"]) base.links = yaml_links(node["links"], base.links, params, treatment, join(path, "links"));
    return base;
}

}  // namespace detail

/// Builds a scenario from a parsed document. `treatment_override`, when set,
/// takes the place of the document's treatment key.
inline ScenarioConfig parse_scenario(const YAML::Node& doc, const std::optional<std::string>& treatment_override = {}) {
    ScenarioConfig cfg;
    if (!doc || doc.IsNull()) {
        if (!treatment_override) throw ParseError("scenario: empty document");
    } else {
        detail::check_keys(doc, {"treatment", "params", "policy", "agents", "periods", "replications", "seed", "output"},
                           "");
    }
    const YAML::Node root = doc && doc.IsMap() ? doc : YAML::Node(YAML::NodeType::Map);

    if (treatment_override) cfg.treatment = *treatment_override;
    else if (root["treatment"]) cfg.treatment = detail::yaml_as<std::string>(root["treatment"], "treatment");
    if (!cfg.treatment.empty()) cfg.params = find_treatment(cfg.treatment).params;
    else if (!root["params"]) throw ParseError("treatment: missing (or give params)");
    if (root["params"]) cfg.params = detail::yaml_params(root["params"], cfg.params);
    cfg.params.validate();

    AgentPolicy base;
    if (root["policy"]) base = detail::yaml_policy(root["policy"], base, cfg.params, cfg.treatment, "policy");
    cfg.policies.assign(static_cast<std::size_t>(cfg.params.n), base);
    if (const auto agents = root["agents"]) {
        if (!agents.IsSequence()) throw ParseError("agents: expected a list");
        for (std::size_t k = 0; k < agents.size(); ++k) {
            const std::string path = "agents[" + std::to_string(k) + "]";
            if (!agents[k].IsMap() || !agents[k]["id"]) throw ParseError(path + ".id: missing");
            const int id = detail::yaml_as<int>(agents[k]["id"], path + ".id");
            if (id < 1 || id > cfg.params.n) throw InvalidArgument(path + ".id: out of range");
            auto& slot = cfg.policies[static_cast<std::size_t>(id - 1)];
            slot = detail::yaml_policy(agents[k], slot, cfg.params, cfg.treatment, path, {"id"});
        }
    }
    if (root["periods"]) cfg.periods = detail::yaml_as<int>(root["periods"], "periods");
    if (root["replications"]) cfg.replications = detail::yaml_as<int>(root["replications"], "replications");
    if (root["seed"]) cfg.seed = detail::yaml_as<std::uint64_t>(root["seed"], "seed");
    if (root["output"]) cfg.output = detail::yaml_as<std::string>(root["output"], "output");
    if (cfg.periods < 1) throw InvalidArgument("periods: must be >= 1");
    if (cfg.replications < 1) throw InvalidArgument("replications: must be >= 1");
    return cfg;
}

inline YAML::Node load_yaml_file(const std::string& path) {
    try {
        return YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ParseError(path + ": cannot open");
    } catch (const YAML::Exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline ScenarioConfig load_scenario(const std::string& path,
                                    const std::optional<std::string>& treatment_override = {}) {
    return parse_scenario(load_yaml_file(path), treatment_override);
}

/// The treatment table in data/treatments.yaml form.
inline std::vector<Treatment> load_treatment_table(const std::string& path) {
    const YAML::Node doc = load_yaml_file(path);
    if (!doc["treatments"] || !doc["treatments"].IsSequence()) throw ParseError("treatments: expected a list");
    std::vector<Treatment> out;
    const auto list = doc["treatments"];
    for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string p = "treatments[" + std::to_string(k) + "]";
        const auto node = list[k];
        detail::check_keys(node, {"name", "params", "equilibrium_networks"}, p);
        Treatment t;
        t.name = detail::yaml_as<std::string>(node["name"], p + ".name");
        t.params = detail::yaml_params(node["params"], GameParams{});
        t.params.validate();
        const auto nets = node["equilibrium_networks"];
        if (!nets.IsSequence()) throw ParseError(p + ".equilibrium_networks: expected a list");
        for (std::size_t j = 0; j < nets.size(); ++j)
            t.equilibrium_networks.push_back(parse_architecture(detail::yaml_as<std::string>(nets[j], p + ".equilibrium_networks")));
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace lqnet
