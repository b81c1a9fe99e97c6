#pragma once

// Outcome metrics over simulated or recorded sessions: efficiency relative to
// the complete-network equilibrium, equilibrium-architecture frequencies,
// link profitability diagnostics, and pooled estimation of the effort model.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lqnet/atlas.hpp"
#include "lqnet/dynamics.hpp"
#include "lqnet/equilibria.hpp"
#include "lqnet/format.hpp"
#include "lqnet/parallel.hpp"
#include "lqnet/structure.hpp"
#include "lqnet/treatments.hpp"

namespace lqnet {

/// Inclusive 1-based period range. Full and LastK resolve against each
/// record's own length.
struct PeriodWindow {
    enum class Kind { Range, Full, LastK };
    Kind kind = Kind::Full;
    int first = 1;
    int last = 1;
    int k = 10;

    static PeriodWindow full() { return {}; }
    static PeriodWindow last_k(int k) { return {Kind::LastK, 1, 1, k}; }
    static PeriodWindow last10() { return last_k(10); }
    static PeriodWindow range(int first, int last) { return {Kind::Range, first, last, 0}; }

    std::pair<int, int> resolve(int periods) const {
        int a = 1, b = periods;
        if (kind == Kind::Range) {
            a = first;
            b = last;
        } else if (kind == Kind::LastK) {
            if (k < 1) throw InvalidArgument("window: last-k needs k >= 1");
            a = std::max(1, periods - k + 1);
        }
        if (periods < 1 || a < 1 || b > periods || a > b)
            throw InvalidArgument("window: empty or outside 1.." + std::to_string(periods));
        return {a, b};
    }

    std::string describe() const {
        switch (kind) {
            case Kind::Full: return "full";
            case Kind::LastK: return "last" + std::to_string(k);
            case Kind::Range: return std::to_string(first) + "-" + std::to_string(last);
        }
        return "?";
    }
};

inline PeriodWindow parse_window(std::string_view s) {
    if (s == "full") return PeriodWindow::full();
    auto to_int = [&](std::string_view t) {
        int v = 0;
        if (!parse_int(t, v)) throw InvalidArgument("window: cannot parse '" + std::string(s) + "'");
        return v;
    };
    if (s.starts_with("last")) return PeriodWindow::last_k(to_int(s.substr(4)));
    if (auto dash = s.find('-'); dash != std::string_view::npos)
        return PeriodWindow::range(to_int(s.substr(0, dash)), to_int(s.substr(dash + 1)));
    throw InvalidArgument("window: expected full, lastK or A-B, got '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

/// Group average payoff of the complete network at its Nash efforts, each link
/// paid once.
inline double complete_benchmark(const GameParams& params) {
    const Network g = Network::complete(params.n);
    return equilibrium_payoffs(params, g, nash_efforts(params, g).efforts).group_average;
}

struct EfficiencyReport {
    double avg_effort = 0.0;
    double avg_payoff = 0.0;
    double relative_efficiency = 0.0;
    double benchmark_payoff = 0.0;
    PeriodWindow window;
    int observations = 0;  // agent-periods
};

inline EfficiencyReport efficiency_report(const std::vector<SessionRecord>& records, const GameParams& params,
                                          PeriodWindow window) {
    if (records.empty()) throw InvalidArgument("efficiency_report: no records");
    EfficiencyReport rep;
    rep.window = window;
    double effort = 0.0, pay = 0.0;
    for (const auto& r : records) {
        const auto [a, b] = window.resolve(r.period_count());
        for (int t = a; t <= b; ++t) {
            const auto& p = r.periods[static_cast<std::size_t>(t - 1)];
            for (std::size_t i = 0; i < p.efforts.size(); ++i) {
                effort += p.efforts[i];
                pay += p.payoffs[i].total;
                ++rep.observations;
            }
        }
    }
    rep.avg_effort = effort / rep.observations;
    rep.avg_payoff = pay / rep.observations;
    rep.benchmark_payoff = complete_benchmark(params);
    rep.relative_efficiency = rep.avg_payoff / rep.benchmark_payoff;
    return rep;
}

inline EfficiencyReport efficiency_report(const std::vector<SessionRecord>& records, std::string_view treatment,
                                          PeriodWindow window) {
    return efficiency_report(records, find_treatment(treatment).params, window);
}

// ---------------------------------------------------------------------------

struct ArchitectureFrequency {
    Architecture architecture = Architecture::Empty;
    double exact = 0.0;
    double within2 = 0.0;
};

struct FrequencyReport {
    std::array<ArchitectureFrequency, 3> rows;
    int periods = 0;

    const ArchitectureFrequency& at(Architecture a) const { return rows[static_cast<std::size_t>(a)]; }
};

/// Link distance from g to the architecture; a star may have any center.
inline int architecture_distance(const Network& g, Architecture a) {
    switch (a) {
        case Architecture::Empty: return g.link_count();
        case Architecture::Complete: return Network::max_links(g.size()) - g.link_count();
        case Architecture::Star: return distance_to_star(g);
    }
    return Network::max_links(g.size());
}

inline FrequencyReport frequency_report(const std::vector<SessionRecord>& records, PeriodWindow window) {
    FrequencyReport rep;
    std::array<int, 3> exact{}, near{};
    for (const auto& r : records) {
        const auto [a, b] = window.resolve(r.period_count());
        for (int t = a; t <= b; ++t) {
            const auto& g = r.periods[static_cast<std::size_t>(t - 1)].network;
            for (auto arch : kArchitectures) {
                const int d = architecture_distance(g, arch);
                exact[static_cast<std::size_t>(arch)] += d == 0;
                near[static_cast<std::size_t>(arch)] += d <= 2;
            }
            ++rep.periods;
        }
    }
    for (auto arch : kArchitectures) {
        auto& row = rep.rows[static_cast<std::size_t>(arch)];
        row.architecture = arch;
        if (rep.periods > 0) {
            row.exact = static_cast<double>(exact[static_cast<std::size_t>(arch)]) / rep.periods;
            row.within2 = static_cast<double>(near[static_cast<std::size_t>(arch)]) / rep.periods;
        }
    }
    return rep;
}

inline FrequencyReport frequency_report(const SessionRecord& record, PeriodWindow window) {
    return frequency_report(std::vector<SessionRecord>{record}, window);
}

// ---------------------------------------------------------------------------

struct LinkDiagnostics {
    double avg_profitable_missing = 0.0;     // per period
    double profitable_missing_share = 0.0;   // of missing links
    double avg_unprofitable_existing = 0.0;  // per period
    double unprofitable_existing_share = 0.0;  // of realized links
    double reciprocated_share = 0.0;         // of realized links
};

/// Per-period counts and shares averaged over the window. A share is averaged
/// only over periods where its denominator is nonzero.
inline LinkDiagnostics link_diagnostics(const SessionRecord& record, PeriodWindow window) {
    const GameParams& params = record.params;
    const auto [a, b] = window.resolve(record.period_count());
    LinkDiagnostics d;
    double miss_share = 0.0, unprof_share = 0.0, recip_share = 0.0;
    int miss_periods = 0, link_periods = 0;
    for (int t = a; t <= b; ++t) {
        const auto& p = record.periods[static_cast<std::size_t>(t - 1)];
        const int n = params.n;
        int missing = 0, profitable = 0, existing = 0, unprofitable = 0, reciprocated = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double benefit = params.lambda * p.efforts[static_cast<std::size_t>(i)] *
                                       p.efforts[static_cast<std::size_t>(j)];
                if (!p.network.has_link(i, j)) {
                    ++missing;
                    profitable += benefit > params.kappa;
                } else {
                    ++existing;
                    unprofitable += benefit < params.kappa;
                    reciprocated += p.intents.initiates(i, j) && p.intents.initiates(j, i);
                }
            }
        d.avg_profitable_missing += profitable;
        d.avg_unprofitable_existing += unprofitable;
        if (missing > 0) {
            miss_share += static_cast<double>(profitable) / missing;
            ++miss_periods;
        }
        if (existing > 0) {
            unprof_share += static_cast<double>(unprofitable) / existing;
            recip_share += static_cast<double>(reciprocated) / existing;
            ++link_periods;
        }
    }
    const int periods = b - a + 1;
    d.avg_profitable_missing /= periods;
    d.avg_unprofitable_existing /= periods;
    if (miss_periods > 0) d.profitable_missing_share = miss_share / miss_periods;
    if (link_periods > 0) {
        d.unprofitable_existing_share = unprof_share / link_periods;
        d.reciprocated_share = recip_share / link_periods;
    }
    return d;
}

// ---------------------------------------------------------------------------

struct FitResult {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double residual_sum_squares = 0.0;
    int observation_count = 0;
};

/// Pooled least squares through the origin of x_it on (own lag, best response
/// to neighbors' lags, summed non-neighbor lags), over periods 2..T.
inline FitResult fit_effort_model(const std::vector<SessionRecord>& records) {
    Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
    Eigen::Vector3d xty = Eigen::Vector3d::Zero();
    double yty = 0.0;
    FitResult fit;
    for (const auto& r : records) {
        if (r.period_count() < 2) throw InvalidArgument("fit_effort_model: records need at least 2 periods");
        for (int t = 1; t < r.period_count(); ++t) {
            const auto& lag = r.periods[static_cast<std::size_t>(t - 1)];
            const auto& cur = r.periods[static_cast<std::size_t>(t)];
            double total = 0.0;
            for (double v : lag.efforts) total += v;
            for (int i = 0; i < r.params.n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                const double nb = neighbor_sum(lag.network, lag.efforts, i);
                const Eigen::Vector3d z(lag.efforts[ui], best_response_effort(r.params, nb),
                                        total - nb - lag.efforts[ui]);
                const double y = cur.efforts[ui];
                xtx += z * z.transpose();
                xty += z * y;
                yty += y * y;
                ++fit.observation_count;
            }
        }
    }
    if (fit.observation_count < 3) throw InvalidArgument("fit_effort_model: fewer than 3 observations");
    Eigen::FullPivLU<Eigen::Matrix3d> lu(xtx);
    lu.setThreshold(1e-10);
    if (lu.rank() < 3) throw RankDeficient("fit_effort_model: regressors are collinear");
    const Eigen::Vector3d beta = lu.solve(xty);
    fit.b0 = beta(0);
    fit.b1 = beta(1);
    fit.b2 = beta(2);
    fit.residual_sum_squares = std::max(0.0, yty - 2.0 * beta.dot(xty) + beta.dot(xtx * beta));
    return fit;
}

// ---------------------------------------------------------------------------

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // population standard deviation
};

inline MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd m;
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size()));
    return m;
}

inline constexpr std::array<std::string_view, 10> kSummaryColumns = {
    "link_count", "link_fraction", "avg_degree",  "min_degree", "max_degree", "clustering",
    "avg_effort", "nash_effort",   "avg_payoff",  "relative_efficiency",
};

struct SummaryRow {
    std::string group;  // session id, or "all"
    std::array<MeanSd, kSummaryColumns.size()> values;

    const MeanSd& get(std::string_view column) const {
        for (std::size_t c = 0; c < kSummaryColumns.size(); ++c)
            if (kSummaryColumns[c] == column) return values[c];
        throw InvalidArgument("summary: unknown column '" + std::string(column) + "'");
    }
};

struct TreatmentSummary {
    std::string treatment;
    PeriodWindow window;
    std::vector<SummaryRow> groups;
    SummaryRow aggregate;  // mean and sd of the group means
};

/// Per-group means and standard deviations across the window's periods.
/// nash_effort is the average Nash effort on each period's realized network.
inline TreatmentSummary treatment_summary(const std::vector<SessionRecord>& records, const GameParams& params,
                                          PeriodWindow window, std::string treatment = {}, unsigned workers = 0) {
    if (records.empty()) throw InvalidArgument("treatment_summary: no records");
    const double benchmark = complete_benchmark(params);
    TreatmentSummary out;
    out.treatment = std::move(treatment);
    out.window = window;
    out.groups.resize(records.size());

    parallel_for(
        static_cast<int>(records.size()),
        [&](int ri) {
            const auto& r = records[static_cast<std::size_t>(ri)];
            const auto [a, b] = window.resolve(r.period_count());
            std::array<std::vector<double>, kSummaryColumns.size()> cols;
            std::map<std::uint64_t, double> nash_cache;
            for (int t = a; t <= b; ++t) {
                const auto& p = r.periods[static_cast<std::size_t>(t - 1)];
                const auto s = stats(p.network);
                const double n = r.params.n;
                double effort = 0.0, pay = 0.0;
                for (std::size_t i = 0; i < p.efforts.size(); ++i) {
                    effort += p.efforts[i];
                    pay += p.payoffs[i].total;
                }
                double nash;
                const std::uint64_t key = graph_code(p.network);
                if (auto it = nash_cache.find(key); it != nash_cache.end()) {
                    nash = it->second;
                } else {
                    const auto x = nash_efforts(r.params, p.network).efforts;
                    nash = 0.0;
                    for (double v : x) nash += v;
                    nash /= n;
                    nash_cache.emplace(key, nash);
                }
                const std::array<double, kSummaryColumns.size()> row = {
                    static_cast<double>(s.link_count), s.link_fraction, s.avg_degree,
                    static_cast<double>(s.min_degree), static_cast<double>(s.max_degree), s.clustering,
                    effort / n, nash, pay / n, pay / n / benchmark,
                };
                for (std::size_t c = 0; c < row.size(); ++c) cols[c].push_back(row[c]);
            }
            auto& g = out.groups[static_cast<std::size_t>(ri)];
            g.group = std::to_string(r.session_id);
            for (std::size_t c = 0; c < cols.size(); ++c) g.values[c] = mean_sd(cols[c]);
        },
        workers);

    out.aggregate.group = "all";
    for (std::size_t c = 0; c < kSummaryColumns.size(); ++c) {
        std::vector<double> means;
        for (const auto& g : out.groups) means.push_back(g.values[c].mean);
        out.aggregate.values[c] = mean_sd(means);
    }
    return out;
}

/// One row per group plus the aggregate; a mean and an sd column per metric.
inline void write_summary_csv(const TreatmentSummary& s, std::ostream& os) {
    os << "treatment,window,group";
    for (auto c : kSummaryColumns) os << ',' << c << "_mean," << c << "_sd";
    os << '\n';
    auto row = [&](const SummaryRow& r) {
        os << s.treatment << ',' << s.window.describe() << ',' << r.group;
        for (const auto& v : r.values) os << ',' << format_double(v.mean) << ',' << format_double(v.sd);
        os << '\n';
    };
    for (const auto& g : s.groups) row(g);
    row(s.aggregate);
}

}  // namespace lqnet
