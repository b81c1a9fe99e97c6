#pragma once

// Small-graph enumeration up to isomorphism.
//
// A graph's code packs the upper triangle of its adjacency matrix into a bit
// string, pair (0,1) most significant. The canonical code is the minimum code
// over all n! relabelings; feasible up to n = 7.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <vector>

#include "lqnet/core.hpp"

namespace lqnet {

inline constexpr int kMaxCanonicalAgents = 7;

namespace detail {
inline int pair_bit(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    // position of (i, j) in lexicographic pair order, counted from the most significant end
    const int before = i * n - i * (i + 1) / 2 + (j - i - 1);
    return Network::max_links(n) - 1 - before;
}
}  // namespace detail

inline std::uint64_t graph_code(const Network& g) {
    std::uint64_t code = 0;
    for (auto [i, j] : g.edges()) code |= std::uint64_t{1} << detail::pair_bit(g.size(), i, j);
    return code;
}

inline Network graph_from_code(int n, std::uint64_t code) {
    Network g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (code >> detail::pair_bit(n, i, j) & 1U) g.add_link(i, j);
    return g;
}

/// Minimum code over all relabelings of `g`.
inline std::uint64_t canonical_code(const Network& g) {
    const int n = g.size();
    if (n > kMaxCanonicalAgents) throw InvalidArgument("canonical_code: n > 7 is not supported");
    const auto edges = g.edges();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = ~std::uint64_t{0};
    do {
        std::uint64_t code = 0;
        for (auto [i, j] : edges)
            code |= std::uint64_t{1} << detail::pair_bit(n, perm[static_cast<std::size_t>(i)],
                                                         perm[static_cast<std::size_t>(j)]);
        best = std::min(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Memoized canonical codes, keyed by (n, labeled code). Safe for concurrent use.
class CanonicalFormCache {
public:
    std::uint64_t canonical(const Network& g) {
        const Key key{g.size(), graph_code(g)};
        {
            std::shared_lock lock(mutex_);
            if (auto it = table_.find(key); it != table_.end()) return it->second;
        }
        const std::uint64_t c = canonical_code(g);
        std::unique_lock lock(mutex_);
        table_.emplace(key, c);
        return c;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return table_.size();
    }

private:
    using Key = std::pair<int, std::uint64_t>;
    mutable std::shared_mutex mutex_;
    std::map<Key, std::uint64_t> table_;
};

inline CanonicalFormCache& canonical_cache() {
    static CanonicalFormCache cache;
    return cache;
}

/// One representative per isomorphism class on n labeled vertices (n <= 6),
/// each in canonical labeling, ordered by link count then code.
/// n = 5 gives the 34-graph atlas.
inline std::vector<Network> nonisomorphic_graphs(int n) {
    if (n < 1 || n > 6) throw InvalidArgument("nonisomorphic_graphs: n must be in [1, 6]");
    const int bits = Network::max_links(n);
    std::vector<std::uint64_t> codes;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
        const Network g = graph_from_code(n, code);
        if (canonical_code(g) == code) codes.push_back(code);
    }
    std::vector<Network> out;
    out.reserve(codes.size());
    for (auto c : codes) out.push_back(graph_from_code(n, c));
    std::stable_sort(out.begin(), out.end(),
                     [](const Network& a, const Network& b) { return a.link_count() < b.link_count(); });
    return out;
}

/// Every nested-split graph on n vertices up to isomorphism (2^(n-1) of them),
/// built by adding vertices one at a time as either isolated or dominating.
inline std::vector<Network> nested_split_graphs(int n) {
    if (n < 1 || n > kMaxAgents) throw InvalidArgument("nested_split_graphs: n out of range");
    std::vector<Network> out;
    const std::uint64_t count = std::uint64_t{1} << (n - 1);
    for (std::uint64_t seq = 0; seq < count; ++seq) {
        Network g(n);
        for (int v = 1; v < n; ++v)
            if (seq >> (v - 1) & 1U)
                for (int u = 0; u < v; ++u) g.add_link(u, v);
        out.push_back(std::move(g));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Network& a, const Network& b) { return a.link_count() < b.link_count(); });
    return out;
}

}  // namespace lqnet
