#pragma once

// Exact Nash verification by exhaustive deviation search, and the search for
// single-sponsor orientations that support a network as an equilibrium.
//
// A deviation by agent i is a new intent set S together with a new effort.
// Given S, the realized neighborhood is S united with the links others initiate
// to i, and payoff is strictly concave in own effort, so the clipped best
// response to that neighborhood dominates every other effort. Enumerating the
// 2^(n-1) intent sets therefore covers all joint effort and link deviations.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lqnet/atlas.hpp"
#include "lqnet/core.hpp"
#include "lqnet/equilibria.hpp"
#include "lqnet/treatments.hpp"

namespace lqnet {

/// Gains at or below this are treated as non-improving.
inline constexpr double kDeviationTolerance = 1e-9;
inline constexpr int kMaxVerifyAgents = 16;

struct Deviation {
    int agent = 0;
    AgentMask intents = 0;
    double effort = 0.0;
    double gain = 0.0;
};

struct DeviationReport {
    bool is_nash = true;
    std::optional<Deviation> worst_deviation;  // present only when it is profitable
    std::int64_t checked_deviations = 0;
    double max_gain = 0.0;  // largest gain found, profitable or not
};

namespace detail {

struct BestDeviation {
    AgentMask intents = 0;
    double effort = 0.0;
    double payoff = 0.0;
    std::int64_t checked = 0;
};

// Best payoff agent i can reach by choosing any intent set, given the links
// `incoming` that others initiate to i and everyone else's efforts.
inline BestDeviation best_deviation(const GameParams& params, const EffortProfile& x, int i, AgentMask incoming) {
    const int n = params.n;
    std::vector<int> others;
    others.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j)
        if (j != i) others.push_back(j);
    const std::size_t m = others.size();
    const std::uint64_t count = std::uint64_t{1} << m;

    const double base = mask_sum(x, incoming);
    // added[s]: effort newly brought in by intent subset s (links already incoming add nothing)
    std::vector<double> added(count, 0.0);
    BestDeviation best;
    best.payoff = -std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < count; ++s) {
        if (s != 0) {
            const int low = std::countr_zero(s);
            const int j = others[static_cast<std::size_t>(low)];
            added[s] = added[s & (s - 1)] + ((incoming & bit(j)) ? 0.0 : x[static_cast<std::size_t>(j)]);
        }
        const double total = base + added[s];
        const double y = best_response_effort(params, total);
        const int links = std::popcount(s);
        const double p = payoff_terms(params, y, total, links).total;
        if (p > best.payoff) {
            AgentMask mask = 0;
            for (std::size_t b = 0; b < m; ++b)
                if (s >> b & 1U) mask |= bit(others[b]);
            best.intents = mask;
            best.effort = y;
            best.payoff = p;
        }
    }
    best.checked = static_cast<std::int64_t>(count);
    return best;
}

inline void check_verifiable(const GameParams& params, const StrategyProfile& profile) {
    params.validate();
    profile.validate(params);
    if (params.n > kMaxVerifyAgents) throw InvalidArgument("verify_nash: n > 16 is not supported");
}

}  // namespace detail

/// Checks every agent against every intent set with its best-response effort.
inline DeviationReport verify_nash(const GameParams& params, const StrategyProfile& profile) {
    detail::check_verifiable(params, profile);
    const Network g = realize_network(profile.intents);
    DeviationReport rep;
    rep.max_gain = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < params.n; ++i) {
        const double current = payoff(params, profile.efforts, profile.intents, g, i).total;
        const auto best = detail::best_deviation(params, profile.efforts, i, profile.intents.incoming(i));
        rep.checked_deviations += best.checked;
        const double gain = best.payoff - current;
        if (gain > rep.max_gain) {
            rep.max_gain = gain;
            if (gain > kDeviationTolerance) rep.worst_deviation = Deviation{i, best.intents, best.effort, gain};
        }
    }
    rep.is_nash = !rep.worst_deviation.has_value();
    return rep;
}

/// Gain for agent i from switching to `intents` with the best-response effort.
inline double deviation_gain(const GameParams& params, const StrategyProfile& profile, int i, AgentMask intents) {
    detail::check_verifiable(params, profile);
    const Network g = realize_network(profile.intents);
    const double current = payoff(params, profile.efforts, profile.intents, g, i).total;
    intents &= all_agents(params.n) & ~bit(i);
    const AgentMask nb = intents | profile.intents.incoming(i);
    const double total = mask_sum(profile.efforts, nb);
    const double y = best_response_effort(params, total);
    return payoff_terms(params, y, total, popcount(intents)).total - current;
}

/// Gain for agent i from changing only its effort.
inline double effort_deviation_gain(const GameParams& params, const StrategyProfile& profile, int i, double effort) {
    detail::check_verifiable(params, profile);
    const Network g = realize_network(profile.intents);
    const double current = payoff(params, profile.efforts, profile.intents, g, i).total;
    return payoff_terms(params, effort, neighbor_sum(g, profile.efforts, i), profile.intents.initiated_count(i)).total -
           current;
}

// ---------------------------------------------------------------------------
// Equilibrium support for a fixed network

struct NESupportReport {
    Network network;
    bool supportable = false;
    std::optional<StrategyProfile> witness;
    std::int64_t orientations_tried = 0;
};

struct SupportOptions {
    std::int64_t budget = std::int64_t{1} << 20;
    int max_agents = 9;
};

namespace detail {

// Orientation search: each link gets exactly one sponsor. Agent i's no-deviation
// condition depends only on the set of links it sponsors, so every agent's
// feasible sponsor sets are tabulated first and the search only combines them.
class OrientationSearch {
public:
    OrientationSearch(const GameParams& params, const Network& g, const EffortProfile& x, std::int64_t budget)
        : params_(params), g_(g), x_(x), budget_(budget), edges_(g.edges()) {
        const int n = params.n;
        feasible_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const AgentMask nb = g.neighbors(i);
            std::vector<int> nbl;
            for_each_agent(nb, [&](int j) { nbl.push_back(j); });
            const std::uint64_t count = std::uint64_t{1} << nbl.size();
            for (std::uint64_t s = 0; s < count; ++s) {
                AgentMask out = 0;
                for (std::size_t b = 0; b < nbl.size(); ++b)
                    if (s >> b & 1U) out |= bit(nbl[b]);
                if (sponsor_set_ok(i, out)) feasible_[static_cast<std::size_t>(i)].push_back(out);
            }
        }
        out_.assign(static_cast<std::size_t>(n), 0);
        in_.assign(static_cast<std::size_t>(n), 0);
    }

    /// Returns the sponsor sets of a supporting orientation, if any exists.
    std::optional<std::vector<AgentMask>> run() {
        for (const auto& f : feasible_)
            if (f.empty()) return std::nullopt;

        // warm start: lower-degree endpoint sponsors, ties to the lower index
        std::vector<AgentMask> greedy(feasible_.size(), 0);
        for (auto [a, b] : edges_) {
            const int s = g_.degree(b) < g_.degree(a) ? b : a;
            greedy[static_cast<std::size_t>(s)] |= bit(s == a ? b : a);
        }
        ++tried_;
        bool ok = true;
        for (std::size_t i = 0; i < greedy.size() && ok; ++i) ok = is_feasible(static_cast<int>(i), greedy[i]);
        if (ok) return greedy;

        if (search(0)) return out_;
        return std::nullopt;
    }

    std::int64_t tried() const noexcept { return tried_; }

private:
    bool sponsor_set_ok(int i, AgentMask out) const {
        const AgentMask nb = g_.neighbors(i);
        const double current =
            payoff_terms(params_, x_[static_cast<std::size_t>(i)], mask_sum(x_, nb), popcount(out)).total;
        const auto best = best_deviation(params_, x_, i, nb & ~out);
        return best.payoff - current <= kDeviationTolerance;
    }

    bool is_feasible(int i, AgentMask out) const {
        const auto& f = feasible_[static_cast<std::size_t>(i)];
        return std::find(f.begin(), f.end(), out) != f.end();
    }

    // Some feasible sponsor set of i agrees with the decisions made so far.
    // Reports the range of further links i could still take on.
    bool consistent(int i, int& min_add, int& max_add) const {
        const AgentMask out = out_[static_cast<std::size_t>(i)];
        const AgentMask in = in_[static_cast<std::size_t>(i)];
        min_add = kMaxAgents;
        max_add = -1;
        for (AgentMask f : feasible_[static_cast<std::size_t>(i)]) {
            if ((f & out) != out || (f & in) != 0) continue;
            const int add = popcount(f & ~out);
            min_add = std::min(min_add, add);
            max_add = std::max(max_add, add);
        }
        return max_add >= 0;
    }

    bool prune_ok(std::size_t next_edge) const {
        const int remaining = static_cast<int>(edges_.size() - next_edge);
        int lo = 0, hi = 0;
        for (int i = 0; i < params_.n; ++i) {
            int mn = 0, mx = 0;
            if (!consistent(i, mn, mx)) return false;
            lo += mn;
            hi += mx;
        }
        return lo <= remaining && remaining <= hi;
    }

    bool search(std::size_t e) {
        if (e == edges_.size()) return true;
        auto [a, b] = edges_[e];
        int first = a, second = b;
        if (g_.degree(b) < g_.degree(a)) std::swap(first, second);
        for (int sponsor : {first, second}) {
            const int other = sponsor == a ? b : a;
            if (++tried_ > budget_)
                throw BudgetExceeded("ne_supportable: orientation search exceeded " + std::to_string(budget_) +
                                     " nodes");
            out_[static_cast<std::size_t>(sponsor)] |= bit(other);
            in_[static_cast<std::size_t>(other)] |= bit(sponsor);
            if (prune_ok(e + 1) && search(e + 1)) return true;
            out_[static_cast<std::size_t>(sponsor)] &= ~bit(other);
            in_[static_cast<std::size_t>(other)] &= ~bit(sponsor);
        }
        return false;
    }

    const GameParams& params_;
    const Network& g_;
    const EffortProfile& x_;
    std::int64_t budget_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<AgentMask>> feasible_;
    std::vector<AgentMask> out_;
    std::vector<AgentMask> in_;
    std::int64_t tried_ = 0;
};

}  // namespace detail

/// Whether `g` with its Nash efforts can be an equilibrium under some
/// single-sponsor orientation of its links.
inline NESupportReport ne_supportable(const GameParams& params, const Network& g, SupportOptions opts = {}) {
    params.validate();
    if (g.size() != params.n) throw DimensionMismatch("ne_supportable: network size differs from params.n");
    if (params.n > opts.max_agents)
        throw InvalidArgument("ne_supportable: n > " + std::to_string(opts.max_agents) + " is not supported");

    NESupportReport rep;
    rep.network = g;
    const EffortProfile x = nash_efforts(params, g).efforts;
    detail::OrientationSearch search(params, g, x, opts.budget);
    const auto sponsors = search.run();
    rep.orientations_tried = search.tried();
    if (!sponsors) return rep;

    StrategyProfile witness{x, IntentProfile(params.n)};
    for (int i = 0; i < params.n; ++i) witness.intents.set_row(i, (*sponsors)[static_cast<std::size_t>(i)]);
    if (!verify_nash(params, witness).is_nash)
        throw std::logic_error("ne_supportable: witness failed verification");
    rep.supportable = true;
    rep.witness = std::move(witness);
    return rep;
}

/// Linking costs at which some agent's set of deviation-proof sponsor sets
/// can change, with efforts held at the Nash solution of `g`. Between two
/// consecutive values the support predicate is constant. Sorted, positive.
inline std::vector<double> support_breakpoints(const GameParams& params, const Network& g) {
    params.validate();
    if (g.size() != params.n) throw DimensionMismatch("support_breakpoints: network size differs from params.n");
    if (params.n > kMaxVerifyAgents) throw InvalidArgument("support_breakpoints: n > 16 is not supported");
    const int n = params.n;
    const EffortProfile x = nash_efforts(params, g).efforts;
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const AgentMask nb = g.neighbors(i);
        std::vector<int> others, nbl;
        for (int j = 0; j < n; ++j)
            if (j != i) others.push_back(j);
        for_each_agent(nb, [&](int j) { nbl.push_back(j); });
        const double xi = x[static_cast<std::size_t>(i)];
        const double current_gross = payoff_terms(params, xi, mask_sum(x, nb), 0).total;

        for (std::uint64_t s = 0; s < (std::uint64_t{1} << nbl.size()); ++s) {
            AgentMask sponsored = 0;
            for (std::size_t b = 0; b < nbl.size(); ++b)
                if (s >> b & 1U) sponsored |= bit(nbl[b]);
            const AgentMask incoming = nb & ~sponsored;
            // best gross deviation payoff per number of initiated links
            std::vector<double> best(others.size() + 1, -std::numeric_limits<double>::infinity());
            std::vector<double> added(std::uint64_t{1} << others.size(), 0.0);
            const double base = mask_sum(x, incoming);
            for (std::uint64_t t = 0; t < added.size(); ++t) {
                if (t != 0) {
                    const int j = others[static_cast<std::size_t>(std::countr_zero(t))];
                    added[t] = added[t & (t - 1)] + ((incoming & bit(j)) ? 0.0 : x[static_cast<std::size_t>(j)]);
                }
                const double total = base + added[t];
                auto& slot = best[static_cast<std::size_t>(std::popcount(t))];
                slot = std::max(slot, payoff_terms(params, best_response_effort(params, total), total, 0).total);
            }
            const int own = popcount(sponsored);
            for (std::size_t c = 0; c < best.size(); ++c) {
                const int diff = static_cast<int>(c) - own;
                if (diff == 0) continue;
                const double k = (best[c] - current_gross) / diff;
                if (k > 0.0 && std::isfinite(k)) out.push_back(k);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return b - a < 1e-9; }), out.end());
    return out;
}

struct EnumerateOptions {
    /// Use every graph up to isomorphism (n <= 5); otherwise empty, star and complete.
    bool all_graphs = false;
    std::vector<Network> candidates;
    SupportOptions support;
};

inline std::vector<Network> enumeration_candidates(int n, const EnumerateOptions& opts) {
    std::vector<Network> pool;
    if (opts.all_graphs) {
        if (n > 5) throw InvalidArgument("enumerate: --all-graphs requires n <= 5");
        pool = nonisomorphic_graphs(n);
    } else {
        for (auto a : kArchitectures) pool.push_back(make_network(a, n));
    }
    for (const auto& c : opts.candidates) {
        if (c.size() != n) throw DimensionMismatch("enumerate: candidate network size differs from n");
        pool.push_back(c);
    }
    // drop isomorphic duplicates (identical ones beyond the canonical-form range)
    std::vector<Network> out;
    std::vector<std::uint64_t> seen;
    for (auto& g : pool) {
        bool dup = false;
        if (n <= kMaxCanonicalAgents) {
            const std::uint64_t key = canonical_cache().canonical(g);
            dup = std::find(seen.begin(), seen.end(), key) != seen.end();
            if (!dup) seen.push_back(key);
        } else {
            dup = std::find(out.begin(), out.end(), g) != out.end();
        }
        if (!dup) out.push_back(std::move(g));
    }
    return out;
}

inline std::vector<NESupportReport> enumerate_ne_networks(const GameParams& params, const EnumerateOptions& opts = {}) {
    params.validate();
    std::vector<NESupportReport> out;
    for (const auto& g : enumeration_candidates(params.n, opts)) out.push_back(ne_supportable(params, g, opts.support));
    return out;
}

}  // namespace lqnet
