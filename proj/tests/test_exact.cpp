#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fhsap/exact.hpp"
#include "test_support.hpp"

using namespace fhsap;
using fhsap::test::worked_2x2;

namespace {

// Plain nested-loop enumeration, the independent oracle for the Gray-code
// path in brute_force.
double naive_optimum(const Instance& inst) {
    std::vector<int> hub(inst.n, 0);
    double best = 1e300;
    while (true) {
        best = std::min(best, eval_cost(inst, assignment_from_hubs(hub, inst.k)).total);
        int i = 0;
        while (i < inst.n && ++hub[i] == inst.k) hub[i++] = 0;
        if (i == inst.n) break;
    }
    return best;
}

}  // namespace

TEST_CASE("worked 2x2 instance: optimum is the split assignment at cost 5") {
    const ExactResult r = brute_force(worked_2x2());
    REQUIRE(r.cost.total == Catch::Approx(5.0));
    REQUIRE(r.enumerated == 4);
    REQUIRE(hubs_of(r.assignment) == std::vector<int>{0, 1});
}

TEST_CASE("single hub has a single assignment") {
    const Instance inst = generate_random(4, 1, HubCostSpec::constant(0), 1);
    const ExactResult r = brute_force(inst);
    REQUIRE(r.enumerated == 1);
    double want = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
            want += inst.demand(i, j) * (inst.cost_out(i, 0) + inst.cost_in(j, 0));
    REQUIRE(r.cost.total == Catch::Approx(want));
}

TEST_CASE("zero demand has zero optimum") {
    Instance inst = worked_2x2();
    inst.demand = Mat(2, 2);
    REQUIRE(brute_force(inst).cost.total == 0.0);
}

TEST_CASE("enumeration count is k^n") {
    const Instance inst = generate_random(6, 3, HubCostSpec::uniform(0, 20), 2);
    REQUIRE(brute_force(inst).enumerated == 729);
}

TEST_CASE("cap refusal names k^n") {
    const Instance inst = generate_random(10, 3, HubCostSpec::constant(1), 3);
    REQUIRE_THROWS_WITH(brute_force(inst, 1000),
                        Catch::Matchers::ContainsSubstring("59049"));
}

TEST_CASE("repeated runs return the identical assignment") {
    const Instance inst = generate_random(6, 3, HubCostSpec::uniform(14, 20), 4);
    const ExactResult a = brute_force(inst);
    const ExactResult b = brute_force(inst);
    REQUIRE(a.assignment == b.assignment);
    REQUIRE(a.cost.total == b.cost.total);
}

TEST_CASE("gray-code delta evaluation matches naive enumeration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 3 + static_cast<int>(seed % 3);
        const int k = 2 + static_cast<int>(seed % 2);
        const Instance inst = generate_random(n, k, HubCostSpec::uniform(0, 20), 500 + seed);
        const ExactResult r = brute_force(inst);
        REQUIRE(r.cost.total == Catch::Approx(naive_optimum(inst)).margin(1e-9));
        REQUIRE(r.cost.total ==
                Catch::Approx(eval_cost(inst, r.assignment).total).margin(1e-12));
    }
}

TEST_CASE("optimal cost is dominated by every enumerated assignment") {
    const Instance inst = generate_random(5, 2, HubCostSpec::uniform(4, 20), 6);
    const ExactResult r = brute_force(inst);
    std::vector<int> hub(inst.n, 0);
    while (true) {
        REQUIRE(r.cost.total <=
                eval_cost(inst, assignment_from_hubs(hub, inst.k)).total + 1e-12);
        int i = 0;
        while (i < inst.n && ++hub[i] == inst.k) hub[i++] = 0;
        if (i == inst.n) break;
    }
}

TEST_CASE("ties break to the lexicographically smallest hub vector") {
    // zero costs: every assignment costs 0, so the all-zeros vector must win
    Instance inst;
    inst.n = 3;
    inst.k = 2;
    inst.demand = Mat(3, 3, 1.0);
    for (int i = 0; i < 3; ++i) inst.demand(i, i) = 0.0;
    inst.cost_out = Mat(3, 2);
    inst.cost_in = Mat(3, 2);
    inst.cost_hub = Mat(2, 2);
    const ExactResult r = brute_force(inst);
    REQUIRE(hubs_of(r.assignment) == std::vector<int>{0, 0, 0});
}
