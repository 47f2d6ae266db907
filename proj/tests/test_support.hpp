// Shared fixtures for the test suites.

#ifndef FHSAP_TEST_SUPPORT_HPP
#define FHSAP_TEST_SUPPORT_HPP

#include <vector>

#include "fhsap/instance.hpp"

namespace fhsap::test {

inline Mat mat(const std::vector<std::vector<double>>& rows) {
    Mat m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

// Two terminals, two hubs, one unit of demand 0 -> 1. Splitting the terminals
// across the hubs costs 2 (linear) + 3 (inter-hub) = 5 and is optimal; parking
// both on hub 0 costs 6.
inline Instance worked_2x2() {
    Instance inst;
    inst.n = 2;
    inst.k = 2;
    inst.demand = mat({{0, 1}, {0, 0}});
    inst.cost_out = mat({{1, 5}, {5, 1}});
    inst.cost_in = inst.cost_out;
    inst.cost_hub = mat({{0, 3}, {3, 0}});
    return inst;
}

}  // namespace fhsap::test

#endif  // FHSAP_TEST_SUPPORT_HPP
