// Checks whether each benchmark architecture can be held as an equilibrium in
// the high-cost five-agent game, then shows the best deviation from a
// perturbed profile.

#include <cstdio>

#include "lqnet/lqnet.hpp"

int main() {
    using namespace lqnet;
    const GameParams& p = find_treatment("N5_HighCost").params;

    for (auto a : kArchitectures) {
        const Network g = make_network(a, p.n);
        const auto r = ne_supportable(p, g);
        std::printf("%-8s supportable: %s\n", std::string(to_string(a)).c_str(), r.supportable ? "yes" : "no");
    }

    StrategyProfile s{nash_efforts(p, Network::empty(p.n)).efforts, IntentProfile(p.n)};
    s.efforts[2] += 1.0;
    const auto rep = verify_nash(p, s);
    std::printf("perturbed empty profile: nash=%s max gain=%.4f", rep.is_nash ? "yes" : "no", rep.max_gain);
    if (rep.worst_deviation)
        std::printf(" (agent %d moves to effort %.4f)", rep.worst_deviation->agent + 1, rep.worst_deviation->effort);
    std::printf("\n");

    GameParams cheap = p;
    cheap.kappa = 2.0;
    std::printf("at kappa=2 the empty network is %s\n",
                ne_supportable(cheap, Network::empty(p.n)).supportable ? "still supportable" : "no longer supportable");
}
