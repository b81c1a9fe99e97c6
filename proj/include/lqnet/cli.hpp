#pragma once

// Command-line front end. dispatch() never exits the process; it returns the
// exit code: 0 on success, 1 on domain errors, 2 on usage errors.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lqnet/analysis.hpp"
#include "lqnet/dynamics.hpp"
#include "lqnet/equilibria.hpp"
#include "lqnet/json_io.hpp"
#include "lqnet/scenario.hpp"
#include "lqnet/session_io.hpp"
#include "lqnet/structure.hpp"
#include "lqnet/thresholds.hpp"
#include "lqnet/treatments.hpp"
#include "lqnet/verifier.hpp"

namespace lqnet::cli {

struct ParamOptions {
    std::string treatment;
    std::string params_file;
    std::optional<double> kappa;
    std::optional<double> lambda;
    std::optional<int> n;

    void attach(CLI::App* app) {
        app->add_option("--treatment,-t", treatment, "Preset name, e.g. N5_LowCost");
        app->add_option("--params", params_file, "JSON file with parameter overrides");
        app->add_option("--kappa", kappa, "Linking cost");
        app->add_option("--lambda", lambda, "Spillover strength");
        app->add_option("--n", n, "Group size");
    }

    GameParams resolve() const {
        GameParams p;
        if (!treatment.empty()) p = find_treatment(treatment).params;
        if (!params_file.empty()) p = params_from_json(read_json_file(params_file), p);
        if (kappa) p.kappa = *kappa;
        if (lambda) p.lambda = *lambda;
        if (n) p.n = *n;
        p.validate();
        return p;
    }
};

inline Json solution_json(const GameParams& params, const Network& g, const EffortSolution& sol) {
    const auto rep = equilibrium_payoffs(params, g, sol.efforts);
    Json j{{"efforts", sol.efforts},
           {"per_agent_payoffs", rep.per_agent},
           {"group_average", rep.group_average},
           {"capped", sol.capped},
           {"residual", sol.residual},
           {"converged", sol.converged},
           {"iterations", sol.iterations}};
    if (rep.star_pair) j["star_center_periphery"] = {rep.star_pair->first, rep.star_pair->second};
    return j;
}

inline Json deviation_json(const DeviationReport& r) {
    Json j{{"is_nash", r.is_nash}, {"max_gain", r.max_gain}, {"checked_deviations", r.checked_deviations}};
    if (r.worst_deviation) {
        const auto& d = *r.worst_deviation;
        j["worst_deviation"] = {{"agent", d.agent + 1}, {"intents", ids_to_json(d.intents)}, {"effort", d.effort},
                                {"gain", d.gain}};
    }
    return j;
}

inline Json stats_json(const NetworkStats& s) {
    return Json{{"link_count", s.link_count}, {"link_fraction", s.link_fraction}, {"avg_degree", s.avg_degree},
                {"min_degree", s.min_degree}, {"max_degree", s.max_degree}, {"clustering", s.clustering}};
}

inline Json classification_json(const Network& g) {
    const auto c = classify(g);
    Json j{{"label", std::string(to_string(c.label))}, {"nested_split", c.nested_split}, {"stats", stats_json(stats(g))}};
    if (c.partition) j["core_periphery"] = {{"core", ids_to_json(c.partition->core)},
                                            {"periphery", ids_to_json(c.partition->periphery)}};
    else j["core_periphery"] = nullptr;
    return j;
}

inline Json summary_row_json(const SummaryRow& r) {
    Json j = Json::object();
    for (std::size_t c = 0; c < kSummaryColumns.size(); ++c)
        j[std::string(kSummaryColumns[c])] = {{"mean", r.values[c].mean}, {"sd", r.values[c].sd}};
    return j;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear-quadratic network games with unilateral link formation", "lqnet"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    // solve
    auto* solve = app.add_subcommand("solve", "Nash and efficient efforts with payoffs on a network");
    ParamOptions solve_p;
    solve_p.attach(solve);
    std::string solve_net = "complete";
    solve->add_option("--network", solve_net, "empty | star | complete | network JSON file");
    bool solve_efficient = false;
    solve->add_flag("--efficient", solve_efficient, "Welfare-maximizing efforts instead of Nash efforts");

    // verify
    auto* verify = app.add_subcommand("verify", "Check a strategy profile for profitable deviations");
    ParamOptions verify_p;
    verify_p.attach(verify);
    std::string profile_file;
    verify->add_option("--profile", profile_file, "Profile JSON file")->required();

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "List networks that can be supported as equilibria");
    ParamOptions enum_p;
    enum_p.attach(enumerate);
    bool all_graphs = false;
    std::vector<std::string> candidate_files;
    enumerate->add_flag("--all-graphs", all_graphs, "Every graph up to isomorphism (n <= 5)");
    enumerate->add_option("--candidate", candidate_files, "Extra candidate network JSON files");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Structural label, core-periphery split and statistics");
    std::string classify_net;
    int classify_n = 5;
    classify_cmd->add_option("--network", classify_net, "empty | star | complete | network JSON file")->required();
    classify_cmd->add_option("--n", classify_n, "Group size for named architectures");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run seeded sessions and write CSV logs");
    std::string sim_treatment, policy_file, out_dir;
    std::optional<int> periods, reps;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    simulate->add_option("--treatment,-t", sim_treatment, "Preset name");
    simulate->add_option("--policy,--scenario", policy_file, "Scenario or policy file (YAML or JSON)");
    simulate->add_option("--periods", periods, "Periods per session");
    simulate->add_option("--reps", reps, "Number of sessions");
    simulate->add_option("--seed", seed, "Seed of the first session");
    simulate->add_option("--out", out_dir, "Output directory");
    simulate->add_option("--workers", workers, "Worker threads (0: all cores)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Outcome tables for a directory of session logs");
    std::string in_dir, an_treatment, window_text = "last10", csv_path;
    analyze->add_option("--in", in_dir, "Directory of session_XXXX.csv files")->required();
    analyze->add_option("--treatment,-t", an_treatment, "Preset for the efficiency benchmark");
    analyze->add_option("--window", window_text, "full | lastK | A-B");
    analyze->add_option("--csv", csv_path, "Summary table path (default: <in>/summary_<window>.csv)");

    // thresholds
    auto* thresholds = app.add_subcommand("thresholds", "Linking-cost cutoffs for the unique-complete and mixed regimes");
    ParamOptions th_p;
    th_p.attach(thresholds);
    int grid = 200;
    thresholds->add_option("--grid", grid, "Uniform grid points over the kappa bracket")->check(CLI::PositiveNumber);

    if (argc <= 1) {
        err << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*solve) {
            const GameParams p = solve_p.resolve();
            const Network g = network_from_spec(solve_net, p.n);
            Json j{{"params", to_json(p)},
                   {"network", to_json(g)},
                   {"label", std::string(to_string(classify(g).label))},
                   {"solution", solve_efficient ? "efficient" : "nash"}};
            j.update(solution_json(p, g, solve_efficient ? efficient_efforts(p, g) : nash_efforts(p, g)));
            out << j.dump(2) << '\n';
        } else if (*verify) {
            const GameParams p = verify_p.resolve();
            const StrategyProfile s = profile_from_json(read_json_file(profile_file));
            if (s.intents.size() != p.n) throw DimensionMismatch("profile: n differs from params.n");
            out << deviation_json(verify_nash(p, s)).dump(2) << '\n';
        } else if (*enumerate) {
            const GameParams p = enum_p.resolve();
            EnumerateOptions opts;
            opts.all_graphs = all_graphs;
            for (const auto& f : candidate_files) opts.candidates.push_back(network_from_spec(f, p.n));
            const auto reports = enumerate_ne_networks(p, opts);
            Json list = Json::array();
            for (const auto& r : reports) {
                if (!r.supportable) continue;
                Json w{{"label", std::string(to_string(classify(r.network).label))},
                       {"network", to_json(r.network)},
                       {"witness", to_json(*r.witness)}};
                list.push_back(w);
            }
            out << Json{{"params", to_json(p)}, {"candidates_checked", reports.size()}, {"supportable", list}}.dump(2)
                << '\n';
        } else if (*classify_cmd) {
            const Network g = network_from_spec(classify_net, classify_n);
            out << classification_json(g).dump(2) << '\n';
        } else if (*simulate) {
            ScenarioConfig cfg;
            std::optional<std::string> t;
            if (!sim_treatment.empty()) t = sim_treatment;
            if (!policy_file.empty()) cfg = load_scenario(policy_file, t);
            else if (t) cfg = parse_scenario(YAML::Node(), t);
            else throw InvalidArgument("simulate: give --treatment or --policy");
            if (periods) cfg.periods = *periods;
            if (reps) cfg.replications = *reps;
            if (seed) cfg.seed = *seed;
            if (!out_dir.empty()) cfg.output = out_dir;
            if (cfg.output.empty()) throw InvalidArgument("output: missing (use --out)");
            if (cfg.periods < 1) throw InvalidArgument("periods: must be >= 1");
            auto records = batch_run(cfg.params, cfg.policies, cfg.periods, cfg.replications, cfg.seed, workers);
            Json files = Json::array();
            for (auto& r : records) {
                r.treatment = cfg.treatment;
                files.push_back(write_record(r, cfg.output).filename().string());
            }
            out << Json{{"treatment", cfg.treatment}, {"params", to_json(cfg.params)}, {"periods", cfg.periods},
                        {"replications", cfg.replications}, {"seed", cfg.seed}, {"output", cfg.output},
                        {"files", files}}
                       .dump(2)
                << '\n';
        } else if (*analyze) {
            const auto records = read_records(in_dir);
            const PeriodWindow window = parse_window(window_text);
            const std::string name = an_treatment.empty() ? records.front().treatment : an_treatment;
            const GameParams p = an_treatment.empty() ? records.front().params : find_treatment(an_treatment).params;
            for (const auto& r : records)
                if (!(r.params == p)) throw InvalidArgument("analyze: records have parameters other than the treatment's");

            const auto eff = efficiency_report(records, p, window);
            const auto freq = frequency_report(records, window);
            const auto summary = treatment_summary(records, p, window, name);
            Json freq_j = Json::object();
            for (const auto& row : freq.rows)
                freq_j[std::string(to_string(row.architecture))] = {{"exact", row.exact}, {"within2", row.within2}};
            LinkDiagnostics diag;
            for (const auto& r : records) {
                const auto d = link_diagnostics(r, window);
                diag.avg_profitable_missing += d.avg_profitable_missing / records.size();
                diag.profitable_missing_share += d.profitable_missing_share / records.size();
                diag.avg_unprofitable_existing += d.avg_unprofitable_existing / records.size();
                diag.unprofitable_existing_share += d.unprofitable_existing_share / records.size();
                diag.reciprocated_share += d.reciprocated_share / records.size();
            }
            Json j{{"treatment", name},
                   {"window", window.describe()},
                   {"records", records.size()},
                   {"efficiency",
                    {{"avg_effort", eff.avg_effort},
                     {"avg_payoff", eff.avg_payoff},
                     {"relative_efficiency", eff.relative_efficiency},
                     {"benchmark_payoff", eff.benchmark_payoff}}},
                   {"frequency", freq_j},
                   {"link_diagnostics",
                    {{"avg_profitable_missing", diag.avg_profitable_missing},
                     {"profitable_missing_share", diag.profitable_missing_share},
                     {"avg_unprofitable_existing", diag.avg_unprofitable_existing},
                     {"unprofitable_existing_share", diag.unprofitable_existing_share},
                     {"reciprocated_share", diag.reciprocated_share}}},
                   {"summary", summary_row_json(summary.aggregate)}};
            try {
                const auto fit = fit_effort_model(records);
                j["effort_fit"] = {{"b0", fit.b0}, {"b1", fit.b1}, {"b2", fit.b2},
                                   {"residual_sum_squares", fit.residual_sum_squares},
                                   {"observation_count", fit.observation_count}};
            } catch (const RankDeficient& e) {
                j["effort_fit"] = {{"error", e.what()}};
            }
            const std::string csv =
                csv_path.empty() ? (std::filesystem::path(in_dir) / ("summary_" + window.describe() + ".csv")).string()
                                 : csv_path;
            std::ofstream os(csv);
            if (!os) throw Error(csv + ": cannot write");
            write_summary_csv(summary, os);
            j["summary_csv"] = csv;
            out << j.dump(2) << '\n';
        } else if (*thresholds) {
            const GameParams p = th_p.resolve();
            ThresholdOptions opts;
            opts.grid_points = grid;
            const auto th = cost_thresholds(p, {}, opts);
            Json cands = Json::array();
            for (const auto& c : th.candidates) {
                if (!c.becomes_supportable) continue;
                Json cj{{"label", std::string(to_string(c.label))}, {"network", to_json(c.network)},
                        {"becomes_supportable", *c.becomes_supportable}};
                cj["ceases_supportable"] = c.ceases_supportable ? Json(*c.ceases_supportable) : Json(nullptr);
                cands.push_back(cj);
            }
            Json j{{"params", to_json(p)}};
            j["kappa1"] = th.kappa1 ? Json(*th.kappa1) : Json(nullptr);
            j["kappa2"] = th.kappa2 ? Json(*th.kappa2) : Json(nullptr);
            j["bracket"] = {th.bracket_lo, th.bracket_hi};
            j["grid_points"] = th.grid_points;
            j["precision"] = th.precision;
            j["supportable_candidates"] = cands;
            out << j.dump(2) << '\n';
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace lqnet::cli
