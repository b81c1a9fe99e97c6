#pragma once

// Domain types and the payoff engine for the linear-quadratic network game
// with unilateral, costly link initiation.
//
//   pi_i(x, G) = theta x_i - (beta/2) x_i^2 + lambda x_i sum_{k in N_i(G)} x_k - kappa eta'_i
//
// Agents are indexed 0..n-1 internally. Neighbor and intent sets are stored as
// bit masks, which caps the group size at kMaxAgents.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lqnet/errors.hpp"

namespace lqnet {

using AgentMask = std::uint32_t;
inline constexpr int kMaxAgents = 32;

inline constexpr AgentMask bit(int i) noexcept { return AgentMask{1} << i; }

inline constexpr AgentMask all_agents(int n) noexcept {
    return n >= kMaxAgents ? ~AgentMask{0} : (bit(n) - 1);
}

inline int popcount(AgentMask m) noexcept { return std::popcount(m); }

/// Calls f(i) for every set bit of m, lowest index first.
template <typename F>
void for_each_agent(AgentMask m, F&& f) {
    while (m != 0) {
        const int i = std::countr_zero(m);
        f(i);
        m &= m - 1;
    }
}

struct GameParams {
    double theta = 10.0;
    double beta = 4.0;
    double lambda = 0.4;
    double kappa = 1.0;
    int n = 5;
    double effort_min = 0.0;
    double effort_max = 20.0;

    void validate() const {
        if (!(theta > 0.0)) throw InvalidArgument("params.theta: must be > 0");
        if (!(beta > 0.0)) throw InvalidArgument("params.beta: must be > 0");
        if (!(lambda > 0.0)) throw InvalidArgument("params.lambda: must be > 0");
        if (!(kappa >= 0.0)) throw InvalidArgument("params.kappa: must be >= 0");
        if (n < 2 || n > kMaxAgents)
            throw InvalidArgument("params.n: must be in [2, " + std::to_string(kMaxAgents) + "]");
        if (!(effort_min >= 0.0)) throw InvalidArgument("params.effort_min: must be >= 0");
        if (!(effort_min < effort_max))
            throw InvalidArgument("params.effort_max: must exceed effort_min");
    }

    double clip(double x) const noexcept { return std::clamp(x, effort_min, effort_max); }

    friend bool operator==(const GameParams&, const GameParams&) = default;
};

/// Directed initiation matrix g'. Row i holds the agents i initiates links to.
class IntentProfile {
public:
    IntentProfile() = default;
    explicit IntentProfile(int n) : n_(n), rows_(static_cast<std::size_t>(n), 0) {
        if (n < 0 || n > kMaxAgents) throw InvalidArgument("intents.n: out of range");
    }

    int size() const noexcept { return n_; }

    bool initiates(int i, int j) const { return (rows_.at(idx(i)) & bit(j)) != 0; }

    void set(int i, int j, bool on = true) {
        check_pair(i, j);
        if (on)
            rows_[idx(i)] |= bit(j);
        else
            rows_[idx(i)] &= ~bit(j);
    }

    AgentMask row(int i) const { return rows_.at(idx(i)); }

    /// Replaces row i; the diagonal bit and bits beyond n are dropped.
    void set_row(int i, AgentMask targets) {
        rows_.at(idx(i)) = targets & all_agents(n_) & ~bit(i);
    }

    int initiated_count(int i) const { return popcount(row(i)); }

    /// Agents that initiate a link to i.
    AgentMask incoming(int i) const {
        AgentMask m = 0;
        for (int j = 0; j < n_; ++j)
            if (rows_[idx(j)] & bit(i)) m |= bit(j);
        return m;
    }

    int total_initiations() const {
        int c = 0;
        for (auto r : rows_) c += popcount(r);
        return c;
    }

    friend bool operator==(const IntentProfile&, const IntentProfile&) = default;

private:
    std::size_t idx(int i) const {
        if (i < 0 || i >= n_) throw InvalidArgument("intents: agent index out of range");
        return static_cast<std::size_t>(i);
    }
    void check_pair(int i, int j) const {
        idx(i);
        idx(j);
        if (i == j) throw InvalidArgument("intents: self-initiation is not allowed");
    }

    int n_ = 0;
    std::vector<AgentMask> rows_;
};

/// Undirected, loop-free realized network G.
class Network {
public:
    Network() = default;
    explicit Network(int n) : n_(n), rows_(static_cast<std::size_t>(n), 0) {
        if (n < 0 || n > kMaxAgents) throw InvalidArgument("network.n: out of range");
    }

    static Network empty(int n) { return Network(n); }

    static Network complete(int n) {
        Network g(n);
        for (int i = 0; i < n; ++i) g.rows_[static_cast<std::size_t>(i)] = all_agents(n) & ~bit(i);
        return g;
    }

    static Network star(int n, int center = 0) {
        Network g(n);
        for (int j = 0; j < n; ++j)
            if (j != center) g.add_link(center, j);
        return g;
    }

    static Network from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
        Network g(n);
        for (auto [i, j] : edges) g.add_link(i, j);
        return g;
    }

    int size() const noexcept { return n_; }

    bool has_link(int i, int j) const { return (rows_.at(idx(i)) & bit(j)) != 0; }

    void add_link(int i, int j) {
        check_pair(i, j);
        rows_[idx(i)] |= bit(j);
        rows_[idx(j)] |= bit(i);
    }

    void remove_link(int i, int j) {
        check_pair(i, j);
        rows_[idx(i)] &= ~bit(j);
        rows_[idx(j)] &= ~bit(i);
    }

    AgentMask neighbors(int i) const { return rows_.at(idx(i)); }
    int degree(int i) const { return popcount(neighbors(i)); }

    int link_count() const {
        int c = 0;
        for (auto r : rows_) c += popcount(r);
        return c / 2;
    }

    static int max_links(int n) noexcept { return n * (n - 1) / 2; }

    /// Links as (i, j) with i < j, lexicographic.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < n_; ++i)
            for_each_agent(rows_[idx(i)] & ~all_agents(i + 1), [&](int j) { out.emplace_back(i, j); });
        return out;
    }

    friend bool operator==(const Network&, const Network&) = default;

private:
    std::size_t idx(int i) const {
        if (i < 0 || i >= n_) throw InvalidArgument("network: agent index out of range");
        return static_cast<std::size_t>(i);
    }
    void check_pair(int i, int j) const {
        idx(i);
        idx(j);
        if (i == j) throw InvalidArgument("network: self-links are not allowed");
    }

    int n_ = 0;
    std::vector<AgentMask> rows_;
};

using EffortProfile = std::vector<double>;

inline void validate_efforts(const GameParams& params, const EffortProfile& efforts) {
    if (static_cast<int>(efforts.size()) != params.n)
        throw DimensionMismatch("efforts: expected " + std::to_string(params.n) + " entries, got " +
                                std::to_string(efforts.size()));
    for (std::size_t i = 0; i < efforts.size(); ++i) {
        const double x = efforts[i];
        if (!(x >= params.effort_min && x <= params.effort_max))
            throw InvalidArgument("efforts[" + std::to_string(i) + "]: outside [effort_min, effort_max]");
    }
}

struct StrategyProfile {
    EffortProfile efforts;
    IntentProfile intents;

    void validate(const GameParams& params) const {
        validate_efforts(params, efforts);
        if (intents.size() != params.n)
            throw DimensionMismatch("intents: expected n = " + std::to_string(params.n));
    }

    friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

struct PayoffBreakdown {
    double own_benefit = 0.0;  // theta x_i
    double effort_cost = 0.0;  // beta/2 x_i^2
    double spillover = 0.0;    // lambda x_i sum_{k in N_i} x_k
    double link_cost = 0.0;    // kappa eta'_i
    double total = 0.0;

    friend bool operator==(const PayoffBreakdown&, const PayoffBreakdown&) = default;
};

/// A link exists when at least one endpoint initiates it.
inline Network realize_network(const IntentProfile& intents) {
    const int n = intents.size();
    Network g(n);
    for (int i = 0; i < n; ++i)
        for_each_agent(intents.row(i), [&](int j) { g.add_link(i, j); });
    return g;
}

inline double mask_sum(const EffortProfile& efforts, AgentMask m) {
    double s = 0.0;
    for_each_agent(m, [&](int k) { s += efforts[static_cast<std::size_t>(k)]; });
    return s;
}

inline double neighbor_sum(const Network& network, const EffortProfile& efforts, int i) {
    return mask_sum(efforts, network.neighbors(i));
}

/// Payoff terms from an effort level, the summed effort of its neighbors, and the
/// number of links the agent pays for.
inline PayoffBreakdown payoff_terms(const GameParams& params, double x, double neighbor_effort_sum,
                                    int initiated) {
    PayoffBreakdown p;
    p.own_benefit = params.theta * x;
    p.effort_cost = 0.5 * params.beta * x * x;
    p.spillover = params.lambda * x * neighbor_effort_sum;
    p.link_cost = params.kappa * initiated;
    p.total = p.own_benefit - p.effort_cost + p.spillover - p.link_cost;
    return p;
}

/// Payoff of agent i when the realized network has already been computed.
inline PayoffBreakdown payoff(const GameParams& params, const EffortProfile& efforts,
                              const IntentProfile& intents, const Network& network, int i) {
    if (i < 0 || i >= params.n) throw InvalidArgument("agent index out of range");
    return payoff_terms(params, efforts[static_cast<std::size_t>(i)], neighbor_sum(network, efforts, i),
                        intents.initiated_count(i));
}

inline PayoffBreakdown payoff(const GameParams& params, const StrategyProfile& profile, int i) {
    profile.validate(params);
    return payoff(params, profile.efforts, profile.intents, realize_network(profile.intents), i);
}

inline std::vector<PayoffBreakdown> payoffs(const GameParams& params, const StrategyProfile& profile) {
    profile.validate(params);
    const Network g = realize_network(profile.intents);
    std::vector<PayoffBreakdown> out;
    out.reserve(static_cast<std::size_t>(params.n));
    for (int i = 0; i < params.n; ++i) out.push_back(payoff(params, profile.efforts, profile.intents, g, i));
    return out;
}

inline double total_welfare(const GameParams& params, const StrategyProfile& profile) {
    double w = 0.0;
    for (const auto& p : payoffs(params, profile)) w += p.total;
    return w;
}

/// Myopic best response: clip((theta + lambda * neighbor_effort_sum) / beta).
inline double best_response_effort(const GameParams& params, double neighbor_effort_sum) {
    return params.clip((params.theta + params.lambda * neighbor_effort_sum) / params.beta);
}

/// Net value of the link {i, j} at the given efforts: lambda x_i x_j - kappa.
inline double link_benefit(const GameParams& params, double x_i, double x_j) {
    return params.lambda * x_i * x_j - params.kappa;
}

}  // namespace lqnet
