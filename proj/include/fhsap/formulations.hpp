// Builds the FHSAP relaxations from an instance, evaluates true allocation
// costs, and converts between solver results and assignments.
//
// Four formulations are provided:
//   milp1  - route-share linearization: variables X_ijst with both marginal
//            couplings, O(n^2 k^2) variables.
//   milp2  - flow formulation: variables Y^i_st with per-(i,s) flow balance,
//            O(n k^2) variables.
//   milp2' - milp2 plus one flow-validity equality per (i,s) with deviation
//            variables y_ijs >= |x_is - x_js|.
//   milp3  - milp2 plus the single aggregated validity equality.
// Passing relax=true drops integrality and yields the LP relaxations
// LP1/LP2/LP2'/LP3.

#ifndef FHSAP_FORMULATIONS_HPP
#define FHSAP_FORMULATIONS_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fhsap/instance.hpp"
#include "fhsap/model.hpp"

namespace fhsap {

struct CostBreakdown {
    double linear = 0.0;     // terminal<->hub transport cost
    double quadratic = 0.0;  // inter-hub transport cost
    double total = 0.0;      // linear + quadratic

    static CostBreakdown of(double lin, double quad) { return {lin, quad, lin + quad}; }
};

// True allocation cost of an integral assignment, evaluated directly from the
// assigned hubs.
inline CostBreakdown eval_cost(const Instance& inst, const Assignment& a) {
    if (!a.integral) throw std::invalid_argument("eval_cost: assignment must be integral");
    const auto hub = hubs_of(a);
    double lin = 0.0, quad = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) {
            const double d = inst.demand(i, j);
            if (d == 0.0) continue;
            lin += d * (inst.cost_out(i, hub[i]) + inst.cost_in(j, hub[j]));
            quad += d * inst.cost_hub(hub[i], hub[j]);
        }
    return CostBreakdown::of(lin, quad);
}

// Same bilinear formulas at a fractional (row-stochastic) assignment.
inline CostBreakdown eval_cost_fractional(const Instance& inst, const Assignment& a) {
    const int n = inst.n, k = inst.k;
    const Totals tot = totals(inst);
    double lin = 0.0;
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s)
            lin += (tot.origin[i] * inst.cost_out(i, s) + tot.destination[i] * inst.cost_in(i, s)) *
                   a.x(i, s);
    // M(s,t) = sum_ij d_ij x_is x_jt via T = demand * x
    Mat T(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = inst.demand(i, j);
            if (d == 0.0) continue;
            for (int t = 0; t < k; ++t) T(i, t) += d * a.x(j, t);
        }
    double quad = 0.0;
    for (int s = 0; s < k; ++s)
        for (int t = 0; t < k; ++t) {
            if (inst.cost_hub(s, t) == 0.0) continue;
            double m = 0.0;
            for (int i = 0; i < n; ++i) m += a.x(i, s) * T(i, t);
            quad += inst.cost_hub(s, t) * m;
        }
    return CostBreakdown::of(lin, quad);
}

// ---- variable index maps ----------------------------------------------------

// Layout of the route-share formulation: x_is first, then X_ijst.
struct Milp1VarMap {
    int n = 0, k = 0;

    int x(int i, int s) const { return i * k + s; }
    int X(int i, int j, int s, int t) const { return n * k + ((i * n + j) * k + s) * k + t; }
    int num_vars() const { return n * k + n * n * k * k; }

    nlohmann::json to_json() const {
        return {{"formulation", "milp1"},
                {"n", n},
                {"k", k},
                {"blocks",
                 {{"x", {{"offset", 0}, {"shape", {n, k}}}},
                  {"X", {{"offset", n * k}, {"shape", {n, n, k, k}}}}}}};
    }
};

// Layout of the flow formulations: x_is, then Y^i_st over ordered pairs
// s != t, then (milp2'/milp3 only) deviation variables y_ijs. Deviations are
// kept for i == j as well; they sit at zero.
struct FlowVarMap {
    int n = 0, k = 0;
    bool has_dev = false;

    int x(int i, int s) const { return i * k + s; }
    int Y(int i, int s, int t) const {
        return n * k + i * k * (k - 1) + s * (k - 1) + (t < s ? t : t - 1);
    }
    int y(int i, int j, int s) const { return n * k + n * k * (k - 1) + (i * n + j) * k + s; }
    int num_vars() const { return n * k + n * k * (k - 1) + (has_dev ? n * n * k : 0); }

    nlohmann::json to_json() const {
        nlohmann::json blocks = {{"x", {{"offset", 0}, {"shape", {n, k}}}},
                                 {"Y",
                                  {{"offset", n * k},
                                   {"shape", {n, k, k - 1}},
                                   {"note", "ordered hub pairs s != t, diagonal omitted"}}}};
        if (has_dev)
            blocks["y"] = {{"offset", n * k + n * k * (k - 1)}, {"shape", {n, n, k}}};
        return {{"formulation", has_dev ? "milp2-strengthened" : "milp2"},
                {"n", n},
                {"k", k},
                {"blocks", blocks}};
    }
};

struct Milp1Model {
    OptModel model;
    Milp1VarMap map;
};

struct FlowModel {
    OptModel model;
    FlowVarMap map;
};

// Raised when a formulation would exceed its configured size cap.
struct SizeGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Milp1Options {
    // Refuse to build when n^2 k^2 exceeds this cap.
    long long max_route_vars = 2'000'000;
};

namespace detail {

inline std::string idx_name(const char* base, std::initializer_list<int> idx) {
    std::ostringstream os;
    os << base;
    for (int v : idx) os << '_' << v;
    return os.str();
}

}  // namespace detail

// Route-share formulation (MILP1 / LP1).
inline Milp1Model build_milp1(const Instance& inst, bool relax, const Milp1Options& opts = {}) {
    require_valid(inst);
    const int n = inst.n, k = inst.k;
    const long long route_vars = 1LL * n * n * k * k;
    if (route_vars > opts.max_route_vars) {
        std::ostringstream os;
        os << "milp1 size guard: n^2 k^2 = " << route_vars << " exceeds cap "
           << opts.max_route_vars << "; use the flow formulations (LP2/LP3) instead";
        throw SizeGuardError(os.str());
    }

    Milp1Model out;
    out.map = {n, k};
    OptModel& m = out.model;
    m.vars.reserve(out.map.num_vars());
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s)
            m.add_var(detail::idx_name("x", {i, s}), 0.0, 1.0, !relax);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int s = 0; s < k; ++s)
                for (int t = 0; t < k; ++t) {
                    const int v = m.add_var(detail::idx_name("X", {i, j, s, t}), 0.0);
                    m.obj[v] = inst.demand(i, j) *
                               (inst.cost_out(i, s) + inst.cost_hub(s, t) + inst.cost_in(j, t));
                }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<LinTerm> sum;
            sum.reserve(k * k);
            for (int s = 0; s < k; ++s)
                for (int t = 0; t < k; ++t) sum.push_back({out.map.X(i, j, s, t), 1.0});
            m.add_con(std::move(sum), '=', 1.0);
            for (int s = 0; s < k; ++s) {
                std::vector<LinTerm> row;
                row.reserve(k + 1);
                for (int t = 0; t < k; ++t) row.push_back({out.map.X(i, j, s, t), 1.0});
                row.push_back({out.map.x(i, s), -1.0});
                m.add_con(std::move(row), '=', 0.0);
            }
            for (int t = 0; t < k; ++t) {
                std::vector<LinTerm> row;
                row.reserve(k + 1);
                for (int s = 0; s < k; ++s) row.push_back({out.map.X(i, j, s, t), 1.0});
                row.push_back({out.map.x(j, t), -1.0});
                m.add_con(std::move(row), '=', 0.0);
            }
        }
    return out;
}

namespace detail {

// Shared core of the flow formulations: variables x and Y, row-stochastic
// rows, flow balance, and the objective.
inline FlowModel build_flow_core(const Instance& inst, bool relax, bool with_dev) {
    require_valid(inst);
    const int n = inst.n, k = inst.k;
    const Totals tot = totals(inst);

    FlowModel out;
    out.map = {n, k, with_dev};
    OptModel& m = out.model;
    m.vars.reserve(out.map.num_vars());
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s) {
            const int v = m.add_var(idx_name("x", {i, s}), 0.0, 1.0, !relax);
            m.obj[v] =
                inst.cost_out(i, s) * tot.origin[i] + inst.cost_in(i, s) * tot.destination[i];
        }
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s)
            for (int t = 0; t < k; ++t) {
                if (s == t) continue;
                const int v = m.add_var(idx_name("Y", {i, s, t}), 0.0);
                m.obj[v] = inst.cost_hub(s, t);
            }
    if (with_dev)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int s = 0; s < k; ++s) m.add_var(idx_name("y", {i, j, s}), 0.0);

    for (int i = 0; i < n; ++i) {
        std::vector<LinTerm> row;
        row.reserve(k);
        for (int s = 0; s < k; ++s) row.push_back({out.map.x(i, s), 1.0});
        m.add_con(std::move(row), '=', 1.0);
    }
    // flow balance per (i,s):
    //   sum_{t!=s} Y^i_st - sum_{t!=s} Y^i_ts - O_i x_is + sum_j d_ij x_js = 0
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s) {
            std::vector<LinTerm> row;
            std::vector<double> xcoef(n, 0.0);
            for (int t = 0; t < k; ++t) {
                if (t == s) continue;
                row.push_back({out.map.Y(i, s, t), 1.0});
                row.push_back({out.map.Y(i, t, s), -1.0});
            }
            xcoef[i] -= tot.origin[i];
            for (int j = 0; j < n; ++j) xcoef[j] += inst.demand(i, j);
            for (int j = 0; j < n; ++j)
                if (xcoef[j] != 0.0) row.push_back({out.map.x(j, s), xcoef[j]});
            m.add_con(std::move(row), '=', 0.0);
        }
    if (with_dev) {
        // y_ijs >= |x_is - x_js| as two inequalities per (i,j,s)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int s = 0; s < k; ++s) {
                    m.add_con({{out.map.x(i, s), 1.0},
                               {out.map.x(j, s), -1.0},
                               {out.map.y(i, j, s), -1.0}},
                              '<', 0.0);
                    m.add_con({{out.map.x(j, s), 1.0},
                               {out.map.x(i, s), -1.0},
                               {out.map.y(i, j, s), -1.0}},
                              '<', 0.0);
                }
    }
    return out;
}

}  // namespace detail

// Flow formulation (MILP2 / LP2).
inline FlowModel build_milp2(const Instance& inst, bool relax) {
    return detail::build_flow_core(inst, relax, false);
}

// MILP2 plus one validity equality per (i,s) (MILP2' / LP2').
inline FlowModel build_milp2prime(const Instance& inst, bool relax) {
    FlowModel out = detail::build_flow_core(inst, relax, true);
    const int n = inst.n, k = inst.k;
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s) {
            std::vector<LinTerm> row;
            for (int t = 0; t < k; ++t) {
                if (t == s) continue;
                row.push_back({out.map.Y(i, s, t), 1.0});
                row.push_back({out.map.Y(i, t, s), 1.0});
            }
            for (int j = 0; j < inst.n; ++j)
                if (inst.demand(i, j) != 0.0)
                    row.push_back({out.map.y(i, j, s), -inst.demand(i, j)});
            out.model.add_con(std::move(row), '=', 0.0);
        }
    return out;
}

// MILP2 plus the single aggregated validity equality (MILP3 / LP3).
inline FlowModel build_milp3(const Instance& inst, bool relax) {
    FlowModel out = detail::build_flow_core(inst, relax, true);
    const int n = inst.n, k = inst.k;
    std::vector<LinTerm> row;
    row.reserve(n * k * (k - 1) + n * n * k);
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s)
            for (int t = 0; t < k; ++t) {
                if (t == s) continue;
                row.push_back({out.map.Y(i, s, t), 2.0});
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (inst.demand(i, j) == 0.0) continue;
            for (int s = 0; s < k; ++s) row.push_back({out.map.y(i, j, s), -inst.demand(i, j)});
        }
    out.model.add_con(std::move(row), '=', 0.0);
    return out;
}

// ---- solutions --------------------------------------------------------------

struct FlowSolution {
    int n = 0, k = 0;
    Assignment x;
    std::vector<double> Y;                // n*k*k, Y(i,s,s) = 0
    bool has_dev = false;
    std::vector<double> y;                // n*n*k when has_dev

    double Yat(int i, int s, int t) const { return Y[(i * k + s) * k + t]; }
    double& Yat(int i, int s, int t) { return Y[(i * k + s) * k + t]; }
    double yat(int i, int j, int s) const { return y[(i * n + j) * k + s]; }
};

struct Lp1Solution {
    int n = 0, k = 0;
    Assignment x;
    std::vector<double> X;  // n*n*k*k route shares

    double Xat(int i, int j, int s, int t) const { return X[((i * n + j) * k + s) * k + t]; }
};

// Flows induced by an integral assignment: Y^i_st = sum_j d_ij x_is x_jt.
// Satisfies the MILP2 flow balance exactly and reproduces eval_cost in the
// MILP2 objective.
inline FlowSolution induced_flows(const Instance& inst, const Assignment& a) {
    if (!a.integral) throw std::invalid_argument("induced_flows: assignment must be integral");
    const auto hub = hubs_of(a);
    FlowSolution fs;
    fs.n = inst.n;
    fs.k = inst.k;
    fs.x = a;
    fs.Y.assign(static_cast<std::size_t>(inst.n) * inst.k * inst.k, 0.0);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) {
            if (hub[j] == hub[i]) continue;
            fs.Yat(i, hub[i], hub[j]) += inst.demand(i, j);
        }
    return fs;
}

// MILP2 objective evaluated at a flow solution.
inline double milp2_objective(const Instance& inst, const FlowSolution& fs) {
    const Totals tot = totals(inst);
    double obj = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (int s = 0; s < inst.k; ++s)
            obj += (inst.cost_out(i, s) * tot.origin[i] +
                    inst.cost_in(i, s) * tot.destination[i]) *
                   fs.x.x(i, s);
    for (int i = 0; i < inst.n; ++i)
        for (int s = 0; s < inst.k; ++s)
            for (int t = 0; t < inst.k; ++t)
                if (s != t) obj += inst.cost_hub(s, t) * fs.Yat(i, s, t);
    return obj;
}

// Largest absolute residual of the flow-validity identity
//   sum_{t!=s} Y^i_st + sum_{t!=s} Y^i_ts = sum_j d_ij |x_is - x_js|
// over all (i,s). Zero (up to roundoff) for induced flows of an integral
// assignment.
inline double lemma1_residual(const Instance& inst, const FlowSolution& fs) {
    if (!fs.x.integral)
        throw std::invalid_argument("lemma1_residual: flow solution must carry an integral x");
    double worst = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (int s = 0; s < inst.k; ++s) {
            double lhs = 0.0;
            for (int t = 0; t < inst.k; ++t)
                if (t != s) lhs += fs.Yat(i, s, t) + fs.Yat(i, t, s);
            double rhs = 0.0;
            for (int j = 0; j < inst.n; ++j)
                rhs += inst.demand(i, j) * std::abs(fs.x.x(i, s) - fs.x.x(j, s));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    return worst;
}

namespace detail {

inline Assignment extract_assignment_block(const SolveResult& res, int n, int k) {
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("extract_assignment: solve status is ") +
                                 to_string(res.status));
    Assignment a;
    a.x = Mat(n, k);
    bool integral = true;
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int s = 0; s < k; ++s) {
            double v = res.x[static_cast<std::size_t>(i) * k + s];
            if (v < 0.0) v = 0.0;
            if (v > 1.0) v = 1.0;
            a.x(i, s) = v;
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "extract_assignment: row " << i << " sums to " << sum;
            throw std::runtime_error(os.str());
        }
        for (int s = 0; s < k; ++s) a.x(i, s) /= sum;  // proportional renormalization
        for (int s = 0; s < k; ++s) {
            const double v = a.x(i, s);
            if (v != 0.0 && v != 1.0) integral = false;
        }
    }
    a.integral = integral;
    return a;
}

}  // namespace detail

// Recovers the row-stochastic assignment block from a solve result. Rows off
// by at most 1e-6 are renormalized proportionally; larger deviations throw.
inline Assignment extract_assignment(const SolveResult& res, const Milp1VarMap& map) {
    return detail::extract_assignment_block(res, map.n, map.k);
}
inline Assignment extract_assignment(const SolveResult& res, const FlowVarMap& map) {
    return detail::extract_assignment_block(res, map.n, map.k);
}

// Snaps near-integral entries to exact {0,1}; returns true when every row
// became a unit vector (the assignment is then marked integral).
inline bool snap_integral(Assignment& a, double tol = 1e-7) {
    bool integral = true;
    for (int i = 0; i < a.x.rows(); ++i) {
        int ones = 0;
        for (int s = 0; s < a.x.cols(); ++s) {
            if (std::abs(a.x(i, s)) <= tol) {
                a.x(i, s) = 0.0;
            } else if (std::abs(a.x(i, s) - 1.0) <= tol) {
                a.x(i, s) = 1.0;
                ++ones;
            } else {
                integral = false;
            }
        }
        if (ones != 1) integral = false;
    }
    if (integral) a.integral = true;
    return integral;
}

inline Lp1Solution extract_lp1(const SolveResult& res, const Milp1VarMap& map) {
    Lp1Solution sol;
    sol.n = map.n;
    sol.k = map.k;
    sol.x = detail::extract_assignment_block(res, map.n, map.k);
    sol.X.assign(res.x.begin() + map.n * map.k, res.x.end());
    return sol;
}

inline FlowSolution extract_flow_solution(const SolveResult& res, const FlowVarMap& map) {
    FlowSolution fs;
    fs.n = map.n;
    fs.k = map.k;
    fs.x = detail::extract_assignment_block(res, map.n, map.k);
    fs.Y.assign(static_cast<std::size_t>(map.n) * map.k * map.k, 0.0);
    for (int i = 0; i < map.n; ++i)
        for (int s = 0; s < map.k; ++s)
            for (int t = 0; t < map.k; ++t)
                if (s != t) fs.Yat(i, s, t) = res.x[map.Y(i, s, t)];
    if (map.has_dev) {
        fs.has_dev = true;
        fs.y.assign(res.x.begin() + map.n * map.k + map.n * map.k * (map.k - 1), res.x.end());
    }
    return fs;
}

// Largest violation of the route-share comparison
//   sum_s |x_is - x_js|  <=  sum_s sum_{t != s} (X_ijst + X_ijts)
// over all terminal pairs. Nonpositive for optimal LP1 solutions.
inline double chekuri_check(const Lp1Solution& sol) {
    double worst = -kInfinity;
    for (int i = 0; i < sol.n; ++i)
        for (int j = 0; j < sol.n; ++j) {
            double lhs = 0.0;
            for (int s = 0; s < sol.k; ++s) lhs += std::abs(sol.x.x(i, s) - sol.x.x(j, s));
            double rhs = 0.0;
            for (int s = 0; s < sol.k; ++s)
                for (int t = 0; t < sol.k; ++t)
                    if (t != s) rhs += sol.Xat(i, j, s, t) + sol.Xat(i, j, t, s);
            worst = std::max(worst, lhs - rhs);
        }
    return worst;
}

}  // namespace fhsap

#endif  // FHSAP_FORMULATIONS_HPP
