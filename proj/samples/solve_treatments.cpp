// Nash and efficient efforts for every preset treatment on the three
// benchmark architectures.

#include <cstdio>

#include "lqnet/lqnet.hpp"

int main() {
    using namespace lqnet;
    for (const auto& t : treatments()) {
        std::printf("%s (n=%d, lambda=%g, kappa=%g)\n", t.name.c_str(), t.params.n, t.params.lambda, t.params.kappa);
        for (auto a : kArchitectures) {
            const Network g = make_network(a, t.params.n);
            const auto nash = nash_efforts(t.params, g);
            const auto eff = efficient_efforts(t.params, g);
            const auto np = equilibrium_payoffs(t.params, g, nash.efforts);
            const auto ep = equilibrium_payoffs(t.params, g, eff.efforts);
            std::printf("  %-8s nash x1=%7.3f avg payoff=%8.3f | efficient x1=%7.3f avg payoff=%8.3f%s\n",
                        std::string(to_string(a)).c_str(), nash.efforts[0], np.group_average, eff.efforts[0],
                        ep.group_average, eff.capped ? " (capped)" : "");
        }
    }
}
