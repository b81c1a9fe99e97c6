#pragma once

// Graph predicates and statistics: nested-split test, architecture labels,
// core-periphery partition, summary statistics and link distance.

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "lqnet/core.hpp"

namespace lqnet {

/// Center index when `g` is a star on n >= 3 agents: one agent of degree n-1,
/// all others of degree 1.
inline std::optional<int> star_center(const Network& g) {
    const int n = g.size();
    if (n < 3 || g.link_count() != n - 1) return std::nullopt;
    std::optional<int> center;
    for (int i = 0; i < n; ++i) {
        const int d = g.degree(i);
        if (d == n - 1) {
            if (center) return std::nullopt;
            center = i;
        } else if (d != 1) {
            return std::nullopt;
        }
    }
    return center;
}

/// Literal triple-quantifier check: g_il = 1 and deg(k) >= deg(l) imply g_ik = 1,
/// for every k distinct from i and l.
inline bool is_nested_split_direct(const Network& g) {
    const int n = g.size();
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            if (i == l || !g.has_link(i, l)) continue;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == l) continue;
                if (g.degree(k) >= g.degree(l) && !g.has_link(i, k)) return false;
            }
        }
    return true;
}

/// Neighborhood nesting in degree order: for every ordered pair (l, k) with
/// deg(k) >= deg(l), N(l) minus k must be contained in N(k).
inline bool is_nested_split_nesting(const Network& g) {
    const int n = g.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g.degree(a) < g.degree(b); });
    for (std::size_t p = 0; p < order.size(); ++p) {
        const int l = order[p];
        const AgentMask nl = g.neighbors(l);
        // Everything at or after the first vertex of equal degree has deg >= deg(l).
        std::size_t q = p;
        while (q > 0 && g.degree(order[q - 1]) == g.degree(l)) --q;
        for (; q < order.size(); ++q) {
            const int k = order[q];
            if (k == l) continue;
            if ((nl & ~bit(k) & ~g.neighbors(k)) != 0) return false;
        }
    }
    return true;
}

inline bool is_nested_split(const Network& g) {
    const bool nesting = is_nested_split_nesting(g);
    if (nesting != is_nested_split_direct(g))
        throw std::logic_error("is_nested_split: quantifier and nesting checks disagree");
    return nesting;
}

enum class Label { Empty, Complete, Star, OtherNestedSplit, NonNestedSplit };

inline std::string_view to_string(Label l) {
    switch (l) {
        case Label::Empty: return "Empty";
        case Label::Complete: return "Complete";
        case Label::Star: return "Star";
        case Label::OtherNestedSplit: return "OtherNestedSplit";
        case Label::NonNestedSplit: return "NonNestedSplit";
    }
    return "?";
}

struct CorePeriphery {
    AgentMask core = 0;
    AgentMask periphery = 0;
};

struct ClassificationLabel {
    Label label = Label::NonNestedSplit;
    bool nested_split = false;
    std::optional<CorePeriphery> partition;
};

inline bool is_core_periphery(const Network& g, AgentMask core) {
    const int n = g.size();
    const AgentMask periphery = all_agents(n) & ~core;
    bool ok = true;
    for_each_agent(core, [&](int i) { ok = ok && ((core & ~bit(i) & ~g.neighbors(i)) == 0); });
    for_each_agent(periphery, [&](int i) { ok = ok && ((g.neighbors(i) & periphery) == 0); });
    return ok;
}

/// Exhaustive bipartition search (n <= 16). Among valid partitions, prefers one
/// whose core degrees all exceed the periphery degrees, then the larger core,
/// then the numerically smallest core mask.
inline std::optional<CorePeriphery> core_periphery_partition(const Network& g) {
    const int n = g.size();
    if (n > 16) return std::nullopt;
    std::optional<CorePeriphery> best;
    bool best_sep = false;
    const AgentMask full = all_agents(n);
    for (AgentMask core = 0; core <= full; ++core) {
        if (is_core_periphery(g, core)) {
            int min_core = kMaxAgents, max_per = -1;
            for_each_agent(core, [&](int i) { min_core = std::min(min_core, g.degree(i)); });
            for_each_agent(full & ~core, [&](int i) { max_per = std::max(max_per, g.degree(i)); });
            const bool sep = min_core > max_per;
            const bool better = !best || (sep && !best_sep) ||
                                (sep == best_sep && popcount(core) > popcount(best->core));
            if (better) {
                best = CorePeriphery{core, full & ~core};
                best_sep = sep;
            }
        }
        if (core == full) break;
    }
    return best;
}

inline ClassificationLabel classify(const Network& g) {
    const int n = g.size();
    ClassificationLabel out;
    out.nested_split = is_nested_split(g);
    const int links = g.link_count();
    if (links == 0)
        out.label = Label::Empty;
    else if (links == Network::max_links(n))
        out.label = Label::Complete;
    else if (star_center(g))
        out.label = Label::Star;
    else
        out.label = out.nested_split ? Label::OtherNestedSplit : Label::NonNestedSplit;
    if (n <= 9) out.partition = core_periphery_partition(g);
    return out;
}

struct NetworkStats {
    int link_count = 0;
    double link_fraction = 0.0;
    double avg_degree = 0.0;
    int min_degree = 0;
    int max_degree = 0;
    double clustering = 0.0;  // mean local clustering; degree < 2 contributes 0
};

inline double local_clustering(const Network& g, int i) {
    const AgentMask nb = g.neighbors(i);
    const int d = popcount(nb);
    if (d < 2) return 0.0;
    int closed = 0;
    for_each_agent(nb, [&](int j) { closed += popcount(g.neighbors(j) & nb); });
    return (closed / 2.0) / (d * (d - 1) / 2.0);
}

inline NetworkStats stats(const Network& g) {
    const int n = g.size();
    NetworkStats s;
    if (n == 0) return s;
    s.link_count = g.link_count();
    s.link_fraction = n > 1 ? static_cast<double>(s.link_count) / Network::max_links(n) : 0.0;
    s.min_degree = n;
    double clust = 0.0;
    for (int i = 0; i < n; ++i) {
        const int d = g.degree(i);
        s.min_degree = std::min(s.min_degree, d);
        s.max_degree = std::max(s.max_degree, d);
        clust += local_clustering(g, i);
    }
    s.avg_degree = 2.0 * s.link_count / n;
    s.clustering = clust / n;
    return s;
}

/// Number of unordered pairs whose link status differs.
inline int link_distance(const Network& a, const Network& b) {
    if (a.size() != b.size()) throw DimensionMismatch("link_distance: networks differ in size");
    int d = 0;
    for (int i = 0; i < a.size(); ++i) d += popcount(a.neighbors(i) ^ b.neighbors(i));
    return d / 2;
}

/// Distance to the nearest star over all choices of center.
inline int distance_to_star(const Network& g) {
    int best = Network::max_links(g.size());
    for (int c = 0; c < g.size(); ++c) best = std::min(best, link_distance(g, Network::star(g.size(), c)));
    return best;
}

}  // namespace lqnet
