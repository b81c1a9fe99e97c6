#pragma once

// Linking-cost cutoffs: the smallest kappa at which some non-complete network
// becomes equilibrium-supportable, and the smallest kappa at which the complete
// network stops being supportable. Each switch point is located on a uniform
// kappa grid and then refined by bisection on ne_supportable.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lqnet/atlas.hpp"
#include "lqnet/structure.hpp"
#include "lqnet/verifier.hpp"

namespace lqnet {

struct ThresholdOptions {
    int grid_points = 200;
    double precision = 1e-6;
    SupportOptions support;
};

struct CandidateSwitch {
    Network network;
    Label label = Label::NonNestedSplit;
    std::optional<double> becomes_supportable;  // first kappa where supportable
    std::optional<double> ceases_supportable;   // first kappa after that where it is not
};

struct CostThresholds {
    std::optional<double> kappa1;  // absent when no non-complete candidate is ever supportable
    std::optional<double> kappa2;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int grid_points = 0;
    double precision = 0.0;
    std::vector<CandidateSwitch> candidates;
};

inline std::vector<Network> default_threshold_candidates(int n) {
    if (n <= 5) return nonisomorphic_graphs(n);
    std::vector<Network> out;
    for (auto a : kArchitectures) out.push_back(make_network(a, n));
    return out;
}

/// Upper end of the kappa bracket. Above it every link costs more than any
/// payoff an agent can earn, so only the empty network is supportable.
inline double kappa_bracket_upper(const GameParams& base, const std::vector<Network>& candidates) {
    double top = 0.0;
    for (const auto& g : candidates) {
        const auto x = nash_efforts(base, g).efforts;
        for (int i = 0; i < base.n; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            top = std::max(top, base.theta * xi - 0.5 * base.beta * xi * xi + base.lambda * xi * neighbor_sum(g, x, i));
        }
    }
    // most an isolated agent could earn by linking to everyone at the cap
    const double s = (base.n - 1) * base.effort_max;
    const double y = best_response_effort(base, s);
    top = std::max(top, payoff_terms(base, y, s, 0).total);
    return std::ceil(top + 1.0);
}

/// Thresholds for `base` with its kappa ignored (n <= 9).
inline CostThresholds cost_thresholds(const GameParams& base, std::vector<Network> candidates = {},
                                      ThresholdOptions opts = {}) {
    base.validate();
    if (base.n > 9) throw InvalidArgument("cost_thresholds: n > 9 is not supported");
    if (candidates.empty()) candidates = default_threshold_candidates(base.n);

    CostThresholds out;
    out.grid_points = opts.grid_points;
    out.precision = opts.precision;
    out.bracket_hi = kappa_bracket_upper(base, candidates);

    auto supportable = [&](const Network& g, double kappa) {
        GameParams p = base;
        p.kappa = kappa;
        return ne_supportable(p, g, opts.support).supportable;
    };
    // Bisection on a cell [lo, hi] whose endpoints disagree; returns the kappa
    // where the predicate takes its value at hi.
    auto refine = [&](const Network& g, double lo, double hi) {
        const bool at_hi = supportable(g, hi);
        while (hi - lo > 0.1 * opts.precision) {
            const double mid = 0.5 * (lo + hi);
            if (supportable(g, mid) == at_hi)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    };

    const int steps = opts.grid_points;
    std::vector<double> uniform(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) uniform[static_cast<std::size_t>(k)] = out.bracket_hi * k / steps;

    for (const auto& g : candidates) {
        CandidateSwitch sw;
        sw.network = g;
        sw.label = classify(g).label;

        // The uniform grid alone can step over narrow support intervals, so it
        // is merged with the exact breakpoints and the midpoints between them.
        std::vector<double> grid = uniform;
        const auto bp = support_breakpoints(base, g);
        for (std::size_t k = 0; k < bp.size(); ++k) {
            if (bp[k] >= out.bracket_hi) break;
            grid.push_back(bp[k]);
            grid.push_back(0.5 * (bp[k] + (k + 1 < bp.size() ? std::min(bp[k + 1], out.bracket_hi) : out.bracket_hi)));
            if (k == 0) grid.push_back(0.5 * bp[k]);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

        std::vector<bool> on;
        on.reserve(grid.size());
        for (double k : grid) on.push_back(supportable(g, k));

        const bool is_empty = g.link_count() == 0;
        const bool is_complete = g.link_count() == Network::max_links(g.size());
        for (std::size_t k = 1; k < on.size(); ++k) {
            if (is_empty && on[k - 1] && !on[k])
                throw BracketFailure("cost_thresholds: empty-network support is not monotone in kappa");
            if (is_complete && !on[k - 1] && on[k])
                throw BracketFailure("cost_thresholds: complete-network support is not monotone in kappa");
        }

        const auto first_on = std::find(on.begin(), on.end(), true);
        if (first_on != on.end()) {
            const auto k = static_cast<std::size_t>(first_on - on.begin());
            sw.becomes_supportable = k == 0 ? 0.0 : refine(g, grid[k - 1], grid[k]);
            const auto first_off = std::find(first_on, on.end(), false);
            if (first_off != on.end()) {
                const auto j = static_cast<std::size_t>(first_off - on.begin());
                sw.ceases_supportable = refine(g, grid[j - 1], grid[j]);
            }
        }
        if (is_empty && !on.back())
            throw BracketFailure("cost_thresholds: empty network not supportable at the bracket top");

        if (is_complete) {
            out.kappa2 = sw.ceases_supportable;
        } else if (sw.becomes_supportable) {
            out.kappa1 = out.kappa1 ? std::min(*out.kappa1, *sw.becomes_supportable) : *sw.becomes_supportable;
        }
        out.candidates.push_back(std::move(sw));
    }
    return out;
}

}  // namespace lqnet
