// Simulates a batch of sessions with estimated behavioral rules, writes the
// logs to a directory and prints the outcome tables.
//
//   sample_simulate_session [out_dir]

#include <cstdio>
#include <filesystem>

#include "lqnet/lqnet.hpp"

int main(int argc, char** argv) {
    using namespace lqnet;
    const std::string name = "N9_LowCost1";
    const GameParams& p = find_treatment(name).params;

    AgentPolicy pol;
    pol.effort = estimated_effort_rule(name);
    pol.effort.noise_sd = 0.5;
    pol.effort.initial.kind = InitialEffortKind::Uniform;
    pol.links.kind = LinkRuleKind::LogisticChoice;
    pol.links.logit = relative_position_logit(p, name);

    auto records = batch_run(p, uniform_policies(p.n, pol), 30, 8, 2024);
    const std::filesystem::path dir = argc > 1 ? argv[1] : "sample_sessions";
    for (auto& r : records) {
        r.treatment = name;
        write_record(r, dir);
    }

    const auto window = PeriodWindow::last10();
    const auto eff = efficiency_report(records, p, window);
    std::printf("%zu sessions written to %s\n", records.size(), dir.string().c_str());
    std::printf("avg effort %.3f  avg payoff %.3f  relative efficiency %.3f\n", eff.avg_effort, eff.avg_payoff,
                eff.relative_efficiency);
    for (const auto& row : frequency_report(records, window).rows)
        std::printf("%-8s exact %.3f  within two links %.3f\n", std::string(to_string(row.architecture)).c_str(),
                    row.exact, row.within2);
    const auto fit = fit_effort_model(records);
    std::printf("effort model fit: b0=%.3f b1=%.3f b2=%.3f (%d obs)\n", fit.b0, fit.b1, fit.b2, fit.observation_count);
}
