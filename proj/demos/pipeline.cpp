// End-to-end library walkthrough: generate a random instance, solve the LP3
// relaxation, round it geometrically, and compare against exact enumeration.

#include <cstdio>

#include "fhsap/fhsap.hpp"

int main() {
    using namespace fhsap;

    const Instance inst = generate_random(8, 3, HubCostSpec::constant(10.0), /*seed=*/42);

    FlowModel lp3 = build_milp3(inst, /*relax=*/true);
    const SolveResult res = solve(lp3.model);
    std::printf("LP3 optimum          : %.4f  (%d IPM iterations, %.3fs)\n", res.objective,
                res.iterations, res.seconds);

    Assignment frac = extract_assignment(res, lp3.map);
    const RoundingOutcome best = gra_best_of(inst, frac, /*trials=*/5000, /*seed=*/7);
    std::printf("best rounded cost    : %.4f  (trial %d)\n", best.cost.total, best.trial);

    const ExactResult exact = brute_force(inst);
    std::printf("enumeration optimum  : %.4f  (%llu assignments)\n", exact.cost.total,
                static_cast<unsigned long long>(exact.enumerated));

    std::printf("Gap-LP3              : %.4f%%\n", (best.cost.total / res.objective - 1.0) * 100.0);
    return 0;
}
