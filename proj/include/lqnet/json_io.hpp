#pragma once

// JSON forms of parameters, networks and strategy profiles. Agents are
// numbered from 1 in every external format.
//
//   network:  {"n": 5, "edges": [[1, 2], [1, 3]]}           i < j
//   intents:  {"n": 5, "intents": [[2, 1], [3, 1]]}         [i, j]: i initiates to j
//   profile:  {"n": 5, "efforts": [...], "intents": [[2, 1], ...]}
//   params:   {"theta": 10, "beta": 4, "lambda": 0.4, "kappa": 1, "n": 5,
//              "effort_min": 0, "effort_max": 20}

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "lqnet/core.hpp"
#include "lqnet/errors.hpp"
#include "lqnet/treatments.hpp"

namespace lqnet {

using Json = nlohmann::ordered_json;

inline Json ids_to_json(AgentMask m) {
    Json a = Json::array();
    for_each_agent(m, [&](int j) { a.push_back(j + 1); });
    return a;
}

inline Json to_json(const GameParams& p) {
    return Json{{"theta", p.theta},   {"beta", p.beta}, {"lambda", p.lambda},         {"kappa", p.kappa},
                {"n", p.n},           {"effort_min", p.effort_min}, {"effort_max", p.effort_max}};
}

inline Json to_json(const Network& g) {
    Json edges = Json::array();
    for (auto [i, j] : g.edges()) edges.push_back({i + 1, j + 1});
    return Json{{"n", g.size()}, {"edges", edges}};
}

inline Json intent_pairs(const IntentProfile& in) {
    Json pairs = Json::array();
    for (int i = 0; i < in.size(); ++i) for_each_agent(in.row(i), [&](int j) { pairs.push_back({i + 1, j + 1}); });
    return pairs;
}

inline Json to_json(const IntentProfile& in) { return Json{{"n", in.size()}, {"intents", intent_pairs(in)}}; }

inline Json to_json(const StrategyProfile& s) {
    return Json{{"n", s.intents.size()}, {"efforts", s.efforts}, {"intents", intent_pairs(s.intents)}};
}

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(path + key + ": missing");
    return j.at(key);
}

inline double json_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    return j.get<double>();
}

inline int json_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
    return j.get<int>();
}

inline int json_agent(const Json& j, int n, const std::string& path) {
    const int id = json_int(j, path);
    if (id < 1 || id > n) throw ParseError(path + ": agent id " + std::to_string(id) + " outside 1.." + std::to_string(n));
    return id - 1;
}

}  // namespace detail

/// Fields present in `j` replace those of `base`.
inline GameParams params_from_json(const Json& j, GameParams base = {}, const std::string& path = "params.") {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const std::string p = path + k;
        if (k == "theta") base.theta = detail::json_number(*it, p);
        else if (k == "beta") base.beta = detail::json_number(*it, p);
        else if (k == "lambda") base.lambda = detail::json_number(*it, p);
        else if (k == "kappa") base.kappa = detail::json_number(*it, p);
        else if (k == "n") base.n = detail::json_int(*it, p);
        else if (k == "effort_min") base.effort_min = detail::json_number(*it, p);
        else if (k == "effort_max") base.effort_max = detail::json_number(*it, p);
        else throw ParseError(p + ": unknown field");
    }
    base.validate();
    return base;
}

namespace detail {
inline std::pair<int, int> json_pair(const Json& j, int n, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ParseError(path + ": expected a pair of agent ids");
    const int a = json_agent(j[0], n, path + "[0]");
    const int b = json_agent(j[1], n, path + "[1]");
    if (a == b) throw ParseError(path + ": agent paired with itself");
    return {a, b};
}

inline int json_size(const Json& j) {
    const int n = json_int(require(j, "n", ""), "n");
    if (n < 1 || n > kMaxAgents) throw ParseError("n: out of range");
    return n;
}

inline void read_intent_pairs(const Json& pairs, IntentProfile& in) {
    if (!pairs.is_array()) throw ParseError("intents: expected an array of [from, to] pairs");
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [a, b] = json_pair(pairs[k], in.size(), "intents[" + std::to_string(k) + "]");
        in.set(a, b, true);
    }
}
}  // namespace detail

inline Network network_from_json(const Json& j) {
    const int n = detail::json_size(j);
    Network g(n);
    const Json& edges = detail::require(j, "edges", "");
    if (!edges.is_array()) throw ParseError("edges: expected an array");
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::string p = "edges[" + std::to_string(k) + "]";
        const auto [a, b] = detail::json_pair(edges[k], n, p);
        if (a > b) throw ParseError(p + ": write each edge as [i, j] with i < j");
        g.add_link(a, b);
    }
    return g;
}

inline IntentProfile intents_from_json(const Json& j) {
    IntentProfile in(detail::json_size(j));
    detail::read_intent_pairs(detail::require(j, "intents", ""), in);
    return in;
}

inline StrategyProfile profile_from_json(const Json& j) {
    const int n = detail::json_size(j);
    StrategyProfile s{EffortProfile(static_cast<std::size_t>(n), 0.0), IntentProfile(n)};
    const Json& e = detail::require(j, "efforts", "");
    if (!e.is_array() || static_cast<int>(e.size()) != n) throw ParseError("efforts: expected " + std::to_string(n) + " numbers");
    for (int i = 0; i < n; ++i)
        s.efforts[static_cast<std::size_t>(i)] = detail::json_number(e[static_cast<std::size_t>(i)], "efforts[" + std::to_string(i) + "]");
    if (j.contains("intents")) detail::read_intent_pairs(j.at("intents"), s.intents);
    return s;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// "empty", "star", "complete" (star centred on agent 1) or a JSON network file.
inline Network network_from_spec(const std::string& spec, int n) {
    if (spec == "empty" || spec == "star" || spec == "complete") return make_network(parse_architecture(spec), n);
    Network g = network_from_json(read_json_file(spec));
    if (g.size() != n) throw DimensionMismatch("network: file has n = " + std::to_string(g.size()) + ", params need " + std::to_string(n));
    return g;
}

}  // namespace lqnet
