// Exhaustive-enumeration exact FHSAP solver. Ground truth for everything the
// relaxations and the rounding are measured against, usable while k^n stays
// within the enumeration cap.

#ifndef FHSAP_EXACT_HPP
#define FHSAP_EXACT_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fhsap/formulations.hpp"
#include "fhsap/instance.hpp"

namespace fhsap {

struct ExactResult {
    Assignment assignment;
    CostBreakdown cost;
    std::uint64_t enumerated = 0;  // always k^n
};

struct EnumerationCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Cost delta when terminal `i` moves from hub `a` to hub `b`, all other
// terminals fixed at `hub`.
inline double move_delta(const Instance& inst, const std::vector<int>& hub,
                         const std::vector<double>& O, const std::vector<double>& D, int i, int a,
                         int b) {
    double d = (inst.cost_out(i, b) - inst.cost_out(i, a)) * O[i] +
               (inst.cost_in(i, b) - inst.cost_in(i, a)) * D[i];
    for (int j = 0; j < inst.n; ++j) {
        if (j == i) continue;
        d += inst.demand(i, j) * (inst.cost_hub(b, hub[j]) - inst.cost_hub(a, hub[j]));
        d += inst.demand(j, i) * (inst.cost_hub(hub[j], b) - inst.cost_hub(hub[j], a));
    }
    return d;
}

}  // namespace detail

// Enumerates every integral assignment (reflected Gray order, one terminal
// moves per step, O(n) delta update) and returns the exact minimizer. Ties
// are broken by the lexicographically smallest hub vector. Refuses when
// k^n > cap, naming k^n in the error.
inline ExactResult brute_force(const Instance& inst, std::uint64_t cap = 10'000'000) {
    require_valid(inst);
    const int n = inst.n, k = inst.k;

    long double count_ld = 1.0L;
    for (int i = 0; i < n; ++i) count_ld *= k;
    if (count_ld > static_cast<long double>(cap)) {
        std::ostringstream os;
        os << "brute_force: k^n = " << count_ld << " exceeds cap " << cap;
        throw EnumerationCapError(os.str());
    }

    const Totals tot = totals(inst);
    std::vector<int> hub(n, 0);
    Assignment current = assignment_from_hubs(hub, k);
    double running = eval_cost(inst, current).total;

    if (k == 1) {
        ExactResult res;
        res.assignment = current;
        res.cost = eval_cost(inst, current);
        res.enumerated = 1;
        return res;
    }

    std::vector<int> best_hub = hub;
    double best = running;

    // reflected mixed-radix Gray enumeration (focus pointers)
    std::vector<int> focus(n + 1);
    std::vector<int> dir(n, 1);
    for (int i = 0; i <= n; ++i) focus[i] = i;

    std::uint64_t visited = 1;
    std::uint64_t since_refresh = 0;
    while (true) {
        const int j = focus[0];
        focus[0] = 0;
        if (j == n) break;
        const int a = hub[j];
        const int b = a + dir[j];
        running += detail::move_delta(inst, hub, tot.origin, tot.destination, j, a, b);
        hub[j] = b;
        if (b == 0 || b == k - 1) {
            dir[j] = -dir[j];
            focus[j] = focus[j + 1];
            focus[j + 1] = j + 1;
        }
        ++visited;
        // periodic exact refresh to keep the running cost drift-free
        if (++since_refresh == 1u << 16) {
            running = eval_cost(inst, assignment_from_hubs(hub, k)).total;
            since_refresh = 0;
        }
        if (running <= best + 1e-9) {
            const double exact = eval_cost(inst, assignment_from_hubs(hub, k)).total;
            if (exact < best || (exact == best && hub < best_hub)) {
                best = exact;
                best_hub = hub;
            }
        }
    }

    ExactResult res;
    res.assignment = assignment_from_hubs(best_hub, k);
    res.cost = eval_cost(inst, res.assignment);
    res.enumerated = visited;
    return res;
}

}  // namespace fhsap

#endif  // FHSAP_EXACT_HPP
