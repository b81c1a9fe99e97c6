#pragma once

// The five experimental parameterizations and the network architectures they
// name. data/treatments.yaml carries the same table in editable form; a unit
// test keeps the two in agreement.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "lqnet/core.hpp"

namespace lqnet {

enum class Architecture { Empty, Star, Complete };

inline constexpr std::array<Architecture, 3> kArchitectures = {Architecture::Empty, Architecture::Star,
                                                               Architecture::Complete};

inline std::string_view to_string(Architecture a) {
    switch (a) {
        case Architecture::Empty: return "Empty";
        case Architecture::Star: return "Star";
        case Architecture::Complete: return "Complete";
    }
    return "?";
}

inline Architecture parse_architecture(std::string_view s) {
    if (s == "empty" || s == "Empty") return Architecture::Empty;
    if (s == "star" || s == "Star") return Architecture::Star;
    if (s == "complete" || s == "Complete") return Architecture::Complete;
    throw InvalidArgument("architecture: unknown name '" + std::string(s) + "'");
}

/// Star networks are centred on agent 0.
inline Network make_network(Architecture a, int n) {
    switch (a) {
        case Architecture::Empty: return Network::empty(n);
        case Architecture::Star: return Network::star(n, 0);
        case Architecture::Complete: return Network::complete(n);
    }
    return Network(n);
}

struct Treatment {
    std::string name;
    GameParams params;
    std::vector<Architecture> equilibrium_networks;
};

namespace detail {
inline GameParams treatment_params(int n, double lambda, double kappa) {
    GameParams p;
    p.theta = 10.0;
    p.beta = 4.0;
    p.lambda = lambda;
    p.kappa = kappa;
    p.n = n;
    p.effort_min = 0.0;
    p.effort_max = 20.0;
    return p;
}
}  // namespace detail

inline const std::vector<Treatment>& treatments() {
    using A = Architecture;
    static const std::vector<Treatment> table = {
        {"N5_LowCost", detail::treatment_params(5, 0.4, 1.0), {A::Complete}},
        {"N5_HighCost", detail::treatment_params(5, 0.4, 3.9), {A::Empty, A::Star, A::Complete}},
        {"N9_LowCost1", detail::treatment_params(9, 0.25, 1.0), {A::Complete}},
        {"N9_LowCost2", detail::treatment_params(9, 0.4, 1.0), {A::Complete}},
        {"N9_HighCost", detail::treatment_params(9, 0.25, 2.5), {A::Empty, A::Star, A::Complete}},
    };
    return table;
}

inline const Treatment& find_treatment(std::string_view name) {
    for (const auto& t : treatments())
        if (t.name == name) return t;
    throw UnknownTreatment("unknown treatment '" + std::string(name) + "'");
}

}  // namespace lqnet
