#pragma once

// Agent-based simulation of the repeated game. Every period all agents choose
// an effort and an intent row simultaneously from the previous period's state.
//
// Effort follows the inertia / myopic best response / conformity model
//
//   x_it = b0 x_{i,t-1} + b1 BR_i(x_{t-1}, G_{t-1}) + b2 sum_{k not in N_i(G_{t-1})} x_{k,t-1} + eps_it
//
// clipped to the effort box. Linking follows one of the rules in LinkRuleKind.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lqnet/core.hpp"
#include "lqnet/parallel.hpp"
#include "lqnet/verifier.hpp"

namespace lqnet {

using Rng = std::mt19937_64;

enum class InitialEffortKind { ParamDefault, Constant, Uniform };

/// Period-1 effort. ParamDefault is theta/beta, the best response to no links.
struct InitialEffort {
    InitialEffortKind kind = InitialEffortKind::ParamDefault;
    double value = 0.0;
};

struct EffortRule {
    double b0 = 0.0;  // own lagged effort
    double b1 = 1.0;  // myopic best response
    double b2 = 0.0;  // summed lagged effort of non-neighbors
    double noise_sd = 0.0;
    InitialEffort initial;

    void validate() const {
        if (!(noise_sd >= 0.0)) throw InvalidArgument("effort.noise_sd: must be >= 0");
        if (!std::isfinite(b0) || !std::isfinite(b1) || !std::isfinite(b2))
            throw InvalidArgument("effort: coefficients must be finite");
    }
};

enum class LinkRuleKind { BestResponseLinks, BenefitThreshold, RankTop, LogisticChoice, Fixed };

inline std::string_view to_string(LinkRuleKind k) {
    switch (k) {
        case LinkRuleKind::BestResponseLinks: return "best_response";
        case LinkRuleKind::BenefitThreshold: return "benefit_threshold";
        case LinkRuleKind::RankTop: return "rank_top";
        case LinkRuleKind::LogisticChoice: return "logistic";
        case LinkRuleKind::Fixed: return "fixed";
    }
    return "?";
}

/// Log-odds coefficients of the per-partner linking probability.
struct LogisticCoefficients {
    double intercept = 0.0;
    double lagged_link = 0.0;     // i initiated to j last period
    double own_effort = 0.0;      // x_{i,t-1}
    double partner_effort = 0.0;  // x_{j,t-1}
    double above_median = 0.0;    // j ranked above the middle band last period
    double below_median = 0.0;    // j ranked below the middle band last period
};

struct LinkRule {
    LinkRuleKind kind = LinkRuleKind::BenefitThreshold;
    int rank_k = 1;             // RankTop
    LogisticCoefficients logit; // LogisticChoice
    AgentMask fixed_targets = 0;  // Fixed

    void validate(int n) const {
        if (kind == LinkRuleKind::RankTop && (rank_k < 0 || rank_k > n - 1))
            throw InvalidArgument("links.k: must be in [0, n-1]");
    }
};

struct AgentPolicy {
    EffortRule effort;
    LinkRule links;
};

struct PeriodRecord {
    IntentProfile intents;
    Network network;
    EffortProfile efforts;
    std::vector<PayoffBreakdown> payoffs;

    friend bool operator==(const PeriodRecord&, const PeriodRecord&) = default;
};

struct SessionRecord {
    int session_id = 0;
    std::uint64_t seed = 0;
    std::string treatment;  // informational; may be empty
    GameParams params;
    std::vector<PeriodRecord> periods;  // periods[t-1] is period t

    int period_count() const noexcept { return static_cast<int>(periods.size()); }

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

// ---------------------------------------------------------------------------
// Presets

/// Inertia / best-response / conformity coefficients estimated per treatment.
inline EffortRule estimated_effort_rule(std::string_view treatment) {
    struct Row {
        std::string_view name;
        double b0, b1, b2;
    };
    static constexpr Row rows[] = {
        {"N5_LowCost", 0.090, 0.966, 0.085},  {"N5_HighCost", 0.161, 0.900, 0.036},
        {"N9_LowCost1", 0.089, 0.455, 0.019}, {"N9_HighCost", 0.298, 0.763, 0.018},
        {"N9_LowCost2", 0.324, 0.376, 0.014},
    };
    for (const auto& r : rows)
        if (r.name == treatment) {
            EffortRule e;
            e.b0 = r.b0;
            e.b1 = r.b1;
            e.b2 = r.b2;
            return e;
        }
    throw UnknownTreatment("no effort preset for treatment '" + std::string(treatment) + "'");
}

/// Link-benefit components model (odds ratios converted to log-odds). The
/// lambda, linking-cost and large-group terms are folded into the intercept.
inline LogisticCoefficients link_benefit_logit(const GameParams& params) {
    LogisticCoefficients c;
    c.intercept = std::log(0.342) + std::log(5.827) * params.lambda + std::log(0.909) * params.kappa +
                  (params.n >= 9 ? std::log(0.623) : 0.0);
    c.lagged_link = std::log(2.800);
    c.own_effort = std::log(1.004);
    c.partner_effort = std::log(1.083);
    return c;
}

/// Relative-position model, estimated separately for the N = 5 and N = 9
/// treatments. Treatment dummies are folded into the intercept.
inline LogisticCoefficients relative_position_logit(const GameParams& params, std::string_view treatment) {
    LogisticCoefficients c;
    if (params.n <= 5) {
        c.intercept = std::log(0.873) + (treatment == "N5_HighCost" ? std::log(0.820) : 0.0);
        c.lagged_link = std::log(2.176);
        c.partner_effort = std::log(1.035);
        c.above_median = std::log(1.158);
        c.below_median = std::log(0.903);
    } else {
        c.intercept = std::log(0.363) + (treatment == "N9_HighCost" ? std::log(0.755) : 0.0) +
                      (treatment == "N9_LowCost2" ? std::log(1.326) : 0.0);
        c.lagged_link = std::log(2.993);
        c.partner_effort = std::log(1.046);
        c.above_median = std::log(1.326);
        c.below_median = std::log(0.921);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Single-agent steps

inline double step_effort(const EffortRule& rule, double own_lag, double neighbor_lag_sum, double non_neighbor_lag_sum,
                          const GameParams& params, Rng& rng) {
    double x = rule.b0 * own_lag + rule.b1 * best_response_effort(params, neighbor_lag_sum) +
               rule.b2 * non_neighbor_lag_sum;
    if (rule.noise_sd > 0.0) x += std::normal_distribution<double>(0.0, rule.noise_sd)(rng);
    return params.clip(x);
}

/// Ranks (1 = highest) of all agents by effort; ties go to the lower index.
inline std::vector<int> effort_ranks(const EffortProfile& x) {
    std::vector<int> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return x[static_cast<std::size_t>(a)] > x[static_cast<std::size_t>(b)];
    });
    std::vector<int> rank(x.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r) + 1;
    return rank;
}

/// Reference rank band for the above/below-median dummies: ranks 4-6 when
/// n = 9, otherwise the median rank (the two middle ranks for even n).
inline std::pair<int, int> median_band(int n) {
    if (n == 9) return {4, 6};
    if (n % 2 == 1) return {(n + 1) / 2, (n + 1) / 2};
    return {n / 2, n / 2 + 1};
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct LinkContext {
    int agent = 0;
    const EffortProfile& lag_efforts;
    const IntentProfile& lag_intents;
    bool cold_start = false;  // period 1: no lagged decisions exist yet
};

/// Intent row of one agent for the coming period.
inline AgentMask step_links(const LinkRule& rule, const LinkContext& ctx, const GameParams& params, Rng& rng) {
    const int n = params.n;
    const int i = ctx.agent;
    const auto& x = ctx.lag_efforts;
    const double xi = x[static_cast<std::size_t>(i)];
    AgentMask row = 0;
    switch (rule.kind) {
        case LinkRuleKind::Fixed:
            row = rule.fixed_targets;
            break;
        case LinkRuleKind::BenefitThreshold:
            for (int j = 0; j < n; ++j)
                if (j != i && link_benefit(params, xi, x[static_cast<std::size_t>(j)]) > 0.0) row |= bit(j);
            break;
        case LinkRuleKind::BestResponseLinks:
            row = detail::best_deviation(params, x, i, ctx.lag_intents.incoming(i)).intents;
            break;
        case LinkRuleKind::RankTop: {
            std::vector<int> others;
            for (int j = 0; j < n; ++j)
                if (j != i) others.push_back(j);
            std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
                return x[static_cast<std::size_t>(a)] > x[static_cast<std::size_t>(b)];
            });
            for (int r = 0; r < rule.rank_k && r < static_cast<int>(others.size()); ++r)
                row |= bit(others[static_cast<std::size_t>(r)]);
            break;
        }
        case LinkRuleKind::LogisticChoice: {
            const auto rank = effort_ranks(x);
            const auto [band_lo, band_hi] = median_band(n);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const auto& c = rule.logit;
                double z = c.intercept;
                if (!ctx.cold_start) {
                    const int r = rank[static_cast<std::size_t>(j)];
                    z += c.lagged_link * (ctx.lag_intents.initiates(i, j) ? 1.0 : 0.0) + c.own_effort * xi +
                         c.partner_effort * x[static_cast<std::size_t>(j)] +
                         c.above_median * (r < band_lo ? 1.0 : 0.0) + c.below_median * (r > band_hi ? 1.0 : 0.0);
                }
                if (u(rng) < logistic(z)) row |= bit(j);
            }
            break;
        }
    }
    return row & all_agents(n) & ~bit(i);
}

// ---------------------------------------------------------------------------
// Sessions

namespace detail {
inline double initial_effort(const EffortRule& rule, const GameParams& params, Rng& rng) {
    switch (rule.initial.kind) {
        case InitialEffortKind::ParamDefault: return params.clip(params.theta / params.beta);
        case InitialEffortKind::Constant: return params.clip(rule.initial.value);
        case InitialEffortKind::Uniform:
            return std::uniform_real_distribution<double>(params.effort_min, params.effort_max)(rng);
    }
    return params.effort_min;
}

inline void finish_period(const GameParams& params, PeriodRecord& rec) {
    rec.network = realize_network(rec.intents);
    rec.payoffs.clear();
    for (int i = 0; i < params.n; ++i) rec.payoffs.push_back(payoff(params, rec.efforts, rec.intents, rec.network, i));
}
}  // namespace detail

/// One group playing `periods` rounds. Deterministic given `seed`.
/// Within a period, effort draws happen in agent order before any link draws.
inline SessionRecord run_session(const GameParams& params, const std::vector<AgentPolicy>& policies, int periods,
                                 std::uint64_t seed, int session_id = 0) {
    params.validate();
    if (static_cast<int>(policies.size()) != params.n)
        throw DimensionMismatch("run_session: need one policy per agent");
    if (periods < 1) throw InvalidArgument("periods: must be >= 1");
    for (const auto& p : policies) {
        p.effort.validate();
        p.links.validate(params.n);
    }

    const auto n = static_cast<std::size_t>(params.n);
    Rng rng(seed);
    SessionRecord rec;
    rec.session_id = session_id;
    rec.seed = seed;
    rec.params = params;
    rec.periods.reserve(static_cast<std::size_t>(periods));

    PeriodRecord first;
    first.efforts.resize(n);
    first.intents = IntentProfile(params.n);
    for (std::size_t i = 0; i < n; ++i) first.efforts[i] = detail::initial_effort(policies[i].effort, params, rng);
    const IntentProfile no_intents(params.n);
    for (int i = 0; i < params.n; ++i) {
        const LinkContext ctx{i, first.efforts, no_intents, true};
        first.intents.set_row(i, step_links(policies[static_cast<std::size_t>(i)].links, ctx, params, rng));
    }
    detail::finish_period(params, first);
    rec.periods.push_back(std::move(first));

    for (int t = 2; t <= periods; ++t) {
        const PeriodRecord& lag = rec.periods.back();
        PeriodRecord cur;
        cur.efforts.resize(n);
        cur.intents = IntentProfile(params.n);
        const double lag_total = std::accumulate(lag.efforts.begin(), lag.efforts.end(), 0.0);
        for (int i = 0; i < params.n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const double nb = neighbor_sum(lag.network, lag.efforts, i);
            const double non_nb = lag_total - nb - lag.efforts[ui];
            cur.efforts[ui] = step_effort(policies[ui].effort, lag.efforts[ui], nb, non_nb, params, rng);
        }
        for (int i = 0; i < params.n; ++i) {
            const LinkContext ctx{i, lag.efforts, lag.intents, false};
            cur.intents.set_row(i, step_links(policies[static_cast<std::size_t>(i)].links, ctx, params, rng));
        }
        detail::finish_period(params, cur);
        rec.periods.push_back(std::move(cur));
    }
    return rec;
}

/// Replication r runs with seed base_seed + r and session id r. Sessions are
/// spread over `workers` threads (0: hardware concurrency); output order is by r.
inline std::vector<SessionRecord> batch_run(const GameParams& params, const std::vector<AgentPolicy>& policies,
                                            int periods, int replications, std::uint64_t base_seed,
                                            unsigned workers = 0) {
    if (replications < 1) throw InvalidArgument("replications: must be >= 1");
    std::vector<SessionRecord> out(static_cast<std::size_t>(replications));
    parallel_for(
        replications,
        [&](int r) {
            out[static_cast<std::size_t>(r)] =
                run_session(params, policies, periods, base_seed + static_cast<std::uint64_t>(r), r);
        },
        workers);
    return out;
}

/// The same policy for every agent.
inline std::vector<AgentPolicy> uniform_policies(int n, const AgentPolicy& p) {
    return std::vector<AgentPolicy>(static_cast<std::size_t>(n), p);
}

}  // namespace lqnet
