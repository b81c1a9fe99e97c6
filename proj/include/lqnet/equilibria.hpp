#pragma once

// Nash and welfare-efficient effort profiles on a fixed network, and the
// payoff report used for the treatment tables.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "lqnet/core.hpp"
#include "lqnet/structure.hpp"

namespace lqnet {

struct EffortSolution {
    EffortProfile efforts;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // max-norm fixed-point gap of the solver's update map
    bool capped = false;    // some component sits at effort_min or effort_max
};

struct SolverOptions {
    double tolerance = 1e-11;
    int max_iterations = 10000;
};

inline Eigen::MatrixXd adjacency_matrix(const Network& g) {
    const int n = g.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for_each_agent(g.neighbors(i), [&](int j) { a(i, j) = 1.0; });
    return a;
}

/// Largest adjacency eigenvalue by power iteration from the all-ones vector.
/// Iterates on A + I so bipartite graphs (eigenvalues +-rho) still converge.
inline double spectral_radius(const Network& g, double rel_tol = 1e-12, int max_iter = 1000) {
    const int n = g.size();
    if (n == 0 || g.link_count() == 0) return 0.0;
    std::vector<double> v(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(v.size());
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = v[static_cast<std::size_t>(i)];
            for_each_agent(g.neighbors(i), [&](int j) { s += v[static_cast<std::size_t>(j)]; });
            w[static_cast<std::size_t>(i)] = s;
            norm2 += s * s;
        }
        const double norm = std::sqrt(norm2);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / norm;
        const bool done = std::abs(norm - estimate) <= rel_tol * norm;
        estimate = norm;
        if (done) break;
    }
    return estimate - 1.0;
}

/// max_i |x_i - BR_i(x)| for the Nash best-response map.
inline double nash_residual(const GameParams& params, const Network& g, const EffortProfile& x) {
    double r = 0.0;
    for (int i = 0; i < params.n; ++i)
        r = std::max(r, std::abs(x[static_cast<std::size_t>(i)] -
                                 best_response_effort(params, neighbor_sum(g, x, i))));
    return r;
}

namespace detail {
inline void check_network(const GameParams& params, const Network& g) {
    params.validate();
    if (g.size() != params.n)
        throw DimensionMismatch("network: expected n = " + std::to_string(params.n) + ", got " +
                                std::to_string(g.size()));
}

inline bool any_at_bound(const GameParams& params, const EffortProfile& x) {
    for (double v : x)
        if (v <= params.effort_min || v >= params.effort_max) return true;
    return false;
}
}  // namespace detail

/// Nash efforts on a fixed network.
///
/// When (lambda/beta) rho(G) < 1 and the Katz-Bonacich solution of
/// [I - (lambda/beta) G] x = (theta/beta) 1 lies inside the effort box it is
/// returned directly. Otherwise clipped best-response iteration runs from the
/// all-effort_min profile; the map is monotone, so this reaches the least fixed
/// point. Throws NonContraction if the iteration budget runs out.
inline EffortSolution nash_efforts(const GameParams& params, const Network& g, SolverOptions opts = {}) {
    detail::check_network(params, g);
    const int n = params.n;
    EffortSolution sol;

    if (params.lambda / params.beta * spectral_radius(g) < 1.0) {
        const Eigen::MatrixXd m =
            Eigen::MatrixXd::Identity(n, n) - (params.lambda / params.beta) * adjacency_matrix(g);
        const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, params.theta / params.beta);
        const Eigen::VectorXd x = m.partialPivLu().solve(rhs);
        if ((x.array() >= params.effort_min).all() && (x.array() <= params.effort_max).all()) {
            sol.efforts.assign(x.data(), x.data() + n);
            sol.residual = nash_residual(params, g, sol.efforts);
            sol.converged = sol.residual <= opts.tolerance;
            sol.capped = detail::any_at_bound(params, sol.efforts);
            return sol;
        }
    }

    EffortProfile x(static_cast<std::size_t>(n), params.effort_min);
    EffortProfile next(x.size());
    for (int it = 1; it <= opts.max_iterations; ++it) {
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            next[static_cast<std::size_t>(i)] = best_response_effort(params, neighbor_sum(g, x, i));
            change = std::max(change, std::abs(next[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]));
        }
        x.swap(next);
        sol.iterations = it;
        if (change <= opts.tolerance) break;
    }
    sol.residual = nash_residual(params, g, x);
    sol.converged = sol.residual <= opts.tolerance;
    if (!sol.converged)
        throw NonContraction("nash_efforts: clipped best-response iteration did not converge within " +
                             std::to_string(opts.max_iterations) + " iterations (residual " +
                             std::to_string(sol.residual) + ")");
    sol.capped = detail::any_at_bound(params, x);
    sol.efforts = std::move(x);
    return sol;
}

/// Sum over agents of theta x_i - beta/2 x_i^2 + lambda x_i sum_{N_i} x_k (no link costs).
inline double gross_welfare(const GameParams& params, const Network& g, const EffortProfile& x) {
    double w = 0.0;
    for (int i = 0; i < params.n; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        w += params.theta * xi - 0.5 * params.beta * xi * xi + params.lambda * xi * neighbor_sum(g, x, i);
    }
    return w;
}

struct EfficientOptions {
    double tolerance = 1e-10;
    int max_sweeps = 2'000'000;
};

/// Welfare-maximizing efforts over the effort box, by cyclic coordinate ascent.
/// Each coordinate update x_i <- clip((theta + 2 lambda sum_{N_i} x_k) / beta) is
/// the exact maximizer of gross welfare in x_i. When beta I - 2 lambda G is not
/// positive definite welfare is unbounded without the cap and the ascent climbs
/// to the upper bound.
inline EffortSolution efficient_efforts(const GameParams& params, const Network& g, EfficientOptions opts = {}) {
    detail::check_network(params, g);
    const int n = params.n;
    EffortProfile x(static_cast<std::size_t>(n), params.clip(params.theta / params.beta));
    auto update = [&](int i) {
        return params.clip((params.theta + 2.0 * params.lambda * neighbor_sum(g, x, i)) / params.beta);
    };

    EffortSolution sol;
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = update(i);
            change = std::max(change, std::abs(v - x[static_cast<std::size_t>(i)]));
            x[static_cast<std::size_t>(i)] = v;
        }
        sol.iterations = sweep;
        if (change < opts.tolerance) break;
    }
    double residual = 0.0;
    for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(update(i) - x[static_cast<std::size_t>(i)]));
    sol.residual = residual;
    sol.converged = residual < opts.tolerance;
    sol.capped = detail::any_at_bound(params, x);
    sol.efforts = std::move(x);
    return sol;
}

// ---------------------------------------------------------------------------
// Sponsorship and payoff reporting

namespace detail {

// Orients `free_edges` so that vertex v takes at most cap[v] of them
// (capacitated bipartite matching, Kuhn-style augmenting paths).
class OrientationMatcher {
public:
    OrientationMatcher(int n, std::vector<std::pair<int, int>> edges, std::vector<int> cap)
        : edges_(std::move(edges)), cap_(std::move(cap)), load_(static_cast<std::size_t>(n), 0),
          owner_(edges_.size(), -1) {}

    bool solve() {
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            seen_.assign(cap_.size(), false);
            if (!augment(e)) return false;
        }
        return true;
    }

private:
    bool augment(std::size_t e) {
        for (int v : {edges_[e].first, edges_[e].second}) {
            const auto vi = static_cast<std::size_t>(v);
            if (seen_[vi]) continue;
            seen_[vi] = true;
            if (load_[vi] < cap_[vi]) {
                owner_[e] = v;
                ++load_[vi];
                return true;
            }
            for (std::size_t f = 0; f < edges_.size(); ++f) {
                if (owner_[f] != v) continue;
                if (augment(f)) {  // f moved to its other endpoint
                    --load_[vi];
                    owner_[e] = v;
                    ++load_[vi];
                    return true;
                }
            }
        }
        return false;
    }

    std::vector<std::pair<int, int>> edges_;
    std::vector<int> cap_;
    std::vector<int> load_;
    std::vector<int> owner_;
    std::vector<bool> seen_;
};

inline bool orientable(int n, const std::vector<std::pair<int, int>>& edges, const std::vector<int>& cap) {
    for (int c : cap)
        if (c < 0) return false;
    OrientationMatcher m(n, edges, cap);
    return m.solve();
}

}  // namespace detail

/// Single-sponsor orientation of `g` minimizing the largest per-agent
/// initiation count. Edges are fixed lexicographically; each goes to its
/// lower-degree endpoint (ties: lower index) whenever the remainder can still
/// meet the optimal cap. A star therefore comes out periphery-sponsored.
inline IntentProfile balanced_sponsorship(const Network& g) {
    const int n = g.size();
    const auto edges = g.edges();
    IntentProfile out(n);
    if (edges.empty()) return out;

    int cap = (static_cast<int>(edges.size()) + n - 1) / n;
    while (!detail::orientable(n, edges, std::vector<int>(static_cast<std::size_t>(n), cap))) ++cap;

    std::vector<int> load(static_cast<std::size_t>(n), 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [a, b] = edges[e];
        int first = a, second = b;
        if (g.degree(b) < g.degree(a)) std::swap(first, second);
        const std::vector<std::pair<int, int>> rest(edges.begin() + static_cast<std::ptrdiff_t>(e) + 1, edges.end());
        auto fits = [&](int sponsor) {
            if (load[static_cast<std::size_t>(sponsor)] + 1 > cap) return false;
            std::vector<int> remaining(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) remaining[static_cast<std::size_t>(v)] = cap - load[static_cast<std::size_t>(v)];
            --remaining[static_cast<std::size_t>(sponsor)];
            return detail::orientable(n, rest, remaining);
        };
        const int sponsor = fits(first) ? first : second;
        const int other = sponsor == a ? b : a;
        out.set(sponsor, other);
        ++load[static_cast<std::size_t>(sponsor)];
    }
    return out;
}

struct EquilibriumPayoffReport {
    std::vector<double> per_agent;
    double group_average = 0.0;
    IntentProfile sponsorship;
    /// (center, mean periphery) when the network is a star.
    std::optional<std::pair<double, double>> star_pair;
};

/// Per-agent payoffs at `efforts` with each link paid once. Without an
/// explicit sponsorship the balanced orientation is used.
inline EquilibriumPayoffReport equilibrium_payoffs(const GameParams& params, const Network& g,
                                                   const EffortProfile& efforts,
                                                   std::optional<IntentProfile> sponsorship = std::nullopt) {
    detail::check_network(params, g);
    validate_efforts(params, efforts);
    IntentProfile s = sponsorship ? *sponsorship : balanced_sponsorship(g);
    if (s.size() != params.n) throw SponsorshipMismatch("sponsorship: wrong group size");
    if (!(realize_network(s) == g)) throw SponsorshipMismatch("sponsorship does not realize the network");
    if (s.total_initiations() != g.link_count())
        throw SponsorshipMismatch("sponsorship: every link must be initiated by exactly one endpoint");

    EquilibriumPayoffReport rep;
    rep.per_agent.reserve(static_cast<std::size_t>(params.n));
    for (int i = 0; i < params.n; ++i) rep.per_agent.push_back(payoff(params, efforts, s, g, i).total);
    double sum = 0.0;
    for (double p : rep.per_agent) sum += p;
    rep.group_average = sum / params.n;
    if (auto c = star_center(g)) {
        double periphery = 0.0;
        for (int i = 0; i < params.n; ++i)
            if (i != *c) periphery += rep.per_agent[static_cast<std::size_t>(i)];
        rep.star_pair = std::make_pair(rep.per_agent[static_cast<std::size_t>(*c)], periphery / (params.n - 1));
    }
    rep.sponsorship = std::move(s);
    return rep;
}

}  // namespace lqnet
