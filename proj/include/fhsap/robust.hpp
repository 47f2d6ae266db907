// Robust FHSAP under demand uncertainty.
//
// Demands are only known to lie in the weighted p-norm ball
//   D = { d : || Sigma^{-1} (d - u) ||_p <= Q },   Sigma = diag(sigma_ij).
// For a fixed integral assignment the worst-case cost has the closed form
//   F_hat = f'u + Q ||Sigma f||_q,   q = p/(p-1),
// with f the per-unit route cost matrix of the assignment. For p = 2 and
// uniform inter-hub costs the whole minimization relaxes to a second-order
// cone program; fractional solutions are rounded geometrically with the
// worst-case cost as the selection criterion.
//
// Note on the inter-hub term: for integral x and uniform off-diagonal cost c,
//   sum_{s,t} c_st x_is x_jt = (c/2) sum_r |x_ir - x_jr|,
// so the SOCP epigraph rows carry the coefficient c/2 on the deviation sum.

#ifndef FHSAP_ROBUST_HPP
#define FHSAP_ROBUST_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fhsap/formulations.hpp"
#include "fhsap/instance.hpp"
#include "fhsap/model.hpp"
#include "fhsap/rounding.hpp"

namespace fhsap {

struct UncertaintySet {
    Mat nominal;  // n x n nominal demand u
    Mat sigma;    // n x n strictly positive weights
    double budget = 0.0;
    double p = 2.0;  // norm order in [1, inf]
};

inline std::vector<std::string> validate(const UncertaintySet& set, int n) {
    std::vector<std::string> errs;
    if (set.nominal.rows() != n || set.nominal.cols() != n)
        errs.push_back("nominal demand is not n x n");
    if (set.sigma.rows() != n || set.sigma.cols() != n) errs.push_back("sigma is not n x n");
    for (int i = 0; i < set.nominal.rows(); ++i)
        for (int j = 0; j < set.nominal.cols(); ++j)
            if (!(set.nominal(i, j) >= 0.0))
                errs.push_back("negative nominal demand at (" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
    for (int i = 0; i < set.sigma.rows(); ++i)
        for (int j = 0; j < set.sigma.cols(); ++j)
            if (!(set.sigma(i, j) > 0.0))
                errs.push_back("nonpositive sigma at (" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
    if (!(set.budget >= 0.0)) errs.push_back("negative budget");
    if (!(set.p >= 1.0)) errs.push_back("norm order p must be >= 1");
    return errs;
}

// Dual norm order q = p/(p-1), with the conventions 1 -> inf and inf -> 1.
inline double dual_order(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("dual_order: p must be >= 1");
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

// Per-unit route cost f_ij of shipping one unit from i to j under a fixed
// integral assignment.
inline Mat route_unit_costs(const Instance& inst, const Assignment& a) {
    if (!a.integral)
        throw std::invalid_argument("route_unit_costs: assignment must be integral");
    const auto hub = hubs_of(a);
    Mat f(inst.n, inst.n);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
            f(i, j) = inst.cost_out(i, hub[i]) + inst.cost_in(j, hub[j]) +
                      inst.cost_hub(hub[i], hub[j]);
    return f;
}

struct RobustEval {
    double nominal_cost = 0.0;  // f'u
    double worst_cost = 0.0;    // f'u + Q ||Sigma f||_q
    Mat worst_demand;           // a maximizer inside the set
};

inline double q_norm(const Mat& m, double q) {
    if (std::isinf(q)) {
        double mx = 0.0;
        for (double v : m.data()) mx = std::max(mx, std::abs(v));
        return mx;
    }
    double acc = 0.0;
    for (double v : m.data()) acc += std::pow(std::abs(v), q);
    return std::pow(acc, 1.0 / q);
}

// || Sigma^{-1} (d - u) ||_p, the set membership functional.
inline double set_distance(const UncertaintySet& set, const Mat& d) {
    Mat delta(d.rows(), d.cols());
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
            delta(i, j) = (d(i, j) - set.nominal(i, j)) / set.sigma(i, j);
    return q_norm(delta, set.p);
}

// Closed-form worst case over the uncertainty set for a fixed integral
// assignment, together with a demand matrix attaining it.
inline RobustEval worst_case_cost(const Instance& inst, const Assignment& a,
                                  const UncertaintySet& set) {
    {
        auto errs = validate(set, inst.n);
        if (!errs.empty())
            throw std::invalid_argument("worst_case_cost: " + errs.front());
    }
    const Mat f = route_unit_costs(inst, a);
    const int n = inst.n;
    const double q = dual_order(set.p);

    Mat sf(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sf(i, j) = set.sigma(i, j) * f(i, j);
    const double norm_q = q_norm(sf, q);

    RobustEval ev;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ev.nominal_cost += f(i, j) * set.nominal(i, j);
    ev.worst_cost = ev.nominal_cost + set.budget * norm_q;

    ev.worst_demand = set.nominal;
    if (set.budget > 0.0 && norm_q > 0.0) {
        if (std::isinf(set.p)) {
            // q = 1: every coordinate pushed to its bound
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    ev.worst_demand(i, j) += set.budget * set.sigma(i, j);
        } else if (set.p == 1.0) {
            // q = inf: whole budget on the largest sigma*f entry (lowest index tie)
            int bi = 0, bj = 0;
            double bv = -1.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (sf(i, j) > bv) {
                        bv = sf(i, j);
                        bi = i;
                        bj = j;
                    }
            ev.worst_demand(bi, bj) += set.budget * set.sigma(bi, bj);
        } else {
            // Hoelder alignment: delta proportional to (sigma f)^(q-1)
            double zp = 0.0;
            for (double v : sf.data()) zp += std::pow(v, q);
            zp = std::pow(zp, 1.0 / set.p);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    ev.worst_demand(i, j) +=
                        set.sigma(i, j) * set.budget * std::pow(sf(i, j), q - 1.0) / zp;
        }
    }
    return ev;
}

// ---- SOCP counterpart (p = 2, uniform inter-hub costs) -----------------------

// Common off-diagonal inter-hub cost, or nullopt when costs are not uniform.
inline std::optional<double> uniform_hub_cost(const Instance& inst) {
    if (inst.k == 1) return 0.0;
    const double c = inst.cost_hub(0, 1);
    for (int s = 0; s < inst.k; ++s)
        for (int t = 0; t < inst.k; ++t) {
            if (s == t) continue;
            if (std::abs(inst.cost_hub(s, t) - c) > 1e-9 * std::max(1.0, std::abs(c)))
                return std::nullopt;
        }
    return c;
}

struct RobustVarMap {
    int n = 0, k = 0;

    int x(int i, int s) const { return i * k + s; }
    int Z(int i, int j) const { return n * k + i * n + j; }
    int w(int i, int j, int r) const { return n * k + n * n + (i * n + j) * k + r; }
    int t() const { return n * k + n * n + n * n * k; }
    int num_vars() const { return n * k + n * n + n * n * k + 1; }

    nlohmann::json to_json() const {
        return {{"formulation", "robust-socp"},
                {"n", n},
                {"k", k},
                {"blocks",
                 {{"x", {{"offset", 0}, {"shape", {n, k}}}},
                  {"Z", {{"offset", n * k}, {"shape", {n, n}}}},
                  {"w", {{"offset", n * k + n * n}, {"shape", {n, n, k}}}},
                  {"t", {{"offset", n * k + n * n + n * n * k}}}}}};
    }
};

struct RobustModel {
    OptModel model;
    RobustVarMap map;
};

// Convex counterpart for p = 2:
//   minimize  sum_ij u_ij Z_ij + Q t
//   s.t.      Z_ij >= sum_s c_out(i,s) x_is + sum_t c_in(j,t) x_jt
//                     + (c/2) sum_r w_ijr
//             w_ijr >= |x_ir - x_jr|,  rows of x on the simplex,
//             t >= || (sigma_ij Z_ij)_ij ||_2.
// Requires uniform off-diagonal inter-hub costs.
inline RobustModel build_robust_socp(const Instance& inst, const UncertaintySet& set) {
    require_valid(inst);
    {
        auto errs = validate(set, inst.n);
        if (!errs.empty())
            throw std::invalid_argument("build_robust_socp: " + errs.front());
    }
    if (set.p != 2.0)
        throw std::invalid_argument(
            "build_robust_socp: only p = 2 is modeled as a second-order cone");
    const auto c_opt = uniform_hub_cost(inst);
    if (!c_opt)
        throw std::invalid_argument(
            "build_robust_socp: inter-hub costs must share one off-diagonal value "
            "(the counterpart is derived under that premise)");
    const double c = *c_opt;
    const int n = inst.n, k = inst.k;

    RobustModel out;
    out.map = {n, k};
    OptModel& m = out.model;
    m.vars.reserve(out.map.num_vars());
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s) m.add_var(detail::idx_name("x", {i, s}), 0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int v = m.add_var(detail::idx_name("Z", {i, j}), -kInfinity, kInfinity);
            m.obj[v] = set.nominal(i, j);
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < k; ++r) m.add_var(detail::idx_name("w", {i, j, r}), 0.0);
    {
        const int tv = m.add_var("t", -kInfinity, kInfinity);
        m.obj[tv] = set.budget;
    }

    for (int i = 0; i < n; ++i) {
        std::vector<LinTerm> row;
        for (int s = 0; s < k; ++s) row.push_back({out.map.x(i, s), 1.0});
        m.add_con(std::move(row), '=', 1.0);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<LinTerm> row;
            std::vector<double> xcoef(n * k, 0.0);
            for (int s = 0; s < k; ++s) xcoef[out.map.x(i, s)] += inst.cost_out(i, s);
            for (int t = 0; t < k; ++t) xcoef[out.map.x(j, t)] += inst.cost_in(j, t);
            for (int v = 0; v < n * k; ++v)
                if (xcoef[v] != 0.0) row.push_back({v, xcoef[v]});
            for (int r = 0; r < k; ++r) row.push_back({out.map.w(i, j, r), c / 2.0});
            row.push_back({out.map.Z(i, j), -1.0});
            m.add_con(std::move(row), '<', 0.0);
            for (int r = 0; r < k; ++r) {
                m.add_con({{out.map.x(i, r), 1.0},
                           {out.map.x(j, r), -1.0},
                           {out.map.w(i, j, r), -1.0}},
                          '<', 0.0);
                m.add_con({{out.map.x(j, r), 1.0},
                           {out.map.x(i, r), -1.0},
                           {out.map.w(i, j, r), -1.0}},
                          '<', 0.0);
            }
        }
    SocConstraint soc;
    soc.t_var = out.map.t();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            soc.arg.push_back({{{out.map.Z(i, j), set.sigma(i, j)}}, 0.0});
    m.soc.push_back(std::move(soc));
    return out;
}

struct RobustSolveOutcome {
    Assignment assignment;
    RobustEval eval;
    bool was_integral = false;  // SOCP returned an integral x, rounding skipped
    double socp_objective = 0.0;
    double solve_seconds = 0.0;
};

// Solves the SOCP counterpart; if the relaxation comes back fractional, runs
// the geometric rounding with the worst-case cost as the selection criterion.
inline RobustSolveOutcome robust_solve(const Instance& inst, const UncertaintySet& set,
                                       int trials, std::uint64_t seed,
                                       const SolveOptions& opts = {}) {
    RobustModel rm = build_robust_socp(inst, set);
    const SolveResult res = solve(rm.model, opts);
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("robust_solve: SOCP solve ended with status ") +
                                 to_string(res.status));
    RobustSolveOutcome out;
    out.socp_objective = res.objective;
    out.solve_seconds = res.seconds;

    Assignment x = detail::extract_assignment_block(res, inst.n, inst.k);
    if (snap_integral(x)) {
        out.assignment = std::move(x);
        out.was_integral = true;
    } else {
        auto rounded = gra_best_of_scored(inst, x, trials, seed, [&](const Assignment& cand) {
            return worst_case_cost(inst, cand, set).worst_cost;
        });
        out.assignment = std::move(rounded.assignment);
        out.was_integral = false;
    }
    out.eval = worst_case_cost(inst, out.assignment, set);
    return out;
}

struct GapPair {
    double gap1 = 0.0;  // regret of the robust choice at nominal demand, percent
    double gap2 = 0.0;  // regret of the nominal choice at worst case, percent
};

inline GapPair gaps(const Instance& inst, const UncertaintySet& set,
                    const Assignment& nominal_choice, const Assignment& robust_choice) {
    const RobustEval en = worst_case_cost(inst, nominal_choice, set);
    const RobustEval er = worst_case_cost(inst, robust_choice, set);
    if (en.nominal_cost == 0.0 || er.worst_cost == 0.0)
        throw std::invalid_argument("gaps: zero denominator");
    GapPair g;
    g.gap1 = (er.nominal_cost - en.nominal_cost) / en.nominal_cost * 100.0;
    g.gap2 = (en.worst_cost - er.worst_cost) / er.worst_cost * 100.0;
    return g;
}

// Benchmark-protocol uncertainty set: nominal = instance demand, sigma drawn
// standard-lognormal and scaled (by 100 in the reference protocol).
inline UncertaintySet lognormal_set(const Instance& inst, double budget, double p,
                                    std::uint64_t seed, double scale = 100.0) {
    UncertaintySet set;
    set.nominal = inst.demand;
    set.sigma = Mat(inst.n, inst.n);
    Rng rng(seed);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) set.sigma(i, j) = scale * rng.lognormal();
    set.budget = budget;
    set.p = p;
    return set;
}

// ---- serialization ------------------------------------------------------------

inline std::string to_json(const UncertaintySet& set) {
    nlohmann::json j;
    j["nominal"] = detail::mat_to_json(set.nominal);
    j["sigma"] = detail::mat_to_json(set.sigma);
    j["budget"] = set.budget;
    if (std::isinf(set.p))
        j["p"] = "inf";
    else
        j["p"] = set.p;
    return j.dump(2);
}

inline UncertaintySet uncertainty_set_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("uncertainty set parse error: ") + e.what());
    }
    for (const char* field : {"nominal", "sigma", "budget", "p"})
        if (!j.contains(field))
            throw std::runtime_error(std::string("uncertainty set missing field '") + field +
                                     "'");
    const auto rows = j["nominal"].is_array() ? static_cast<int>(j["nominal"].size()) : 0;
    UncertaintySet set;
    set.nominal = detail::mat_from_json(j["nominal"], rows, rows, "nominal");
    set.sigma = detail::mat_from_json(j["sigma"], rows, rows, "sigma");
    if (!j["budget"].is_number()) throw std::runtime_error("field 'budget' must be a number");
    set.budget = j["budget"].get<double>();
    if (j["p"].is_string()) {
        if (j["p"].get<std::string>() != "inf")
            throw std::runtime_error("field 'p' must be a number or \"inf\"");
        set.p = std::numeric_limits<double>::infinity();
    } else if (j["p"].is_number()) {
        set.p = j["p"].get<double>();
    } else {
        throw std::runtime_error("field 'p' must be a number or \"inf\"");
    }
    auto errs = validate(set, rows);
    if (!errs.empty()) throw std::runtime_error("uncertainty set invalid: " + errs.front());
    return set;
}

}  // namespace fhsap

#endif  // FHSAP_ROBUST_HPP
