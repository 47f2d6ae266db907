// Solver-agnostic optimization model (LP + second-order cone + optional
// integrality) and the solving contract. Continuous models are handed to the
// embedded interior-point solver in conic.hpp; models with integer variables
// are solved by a small best-first branch-and-bound over the continuous
// relaxation when enabled, and rejected otherwise.

#ifndef FHSAP_MODEL_HPP
#define FHSAP_MODEL_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhsap/conic.hpp"

namespace fhsap {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class SolveStatus { Optimal, Infeasible, Unbounded, Limit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Limit: return "limit";
    }
    return "?";
}

// Thrown when a model needs a capability that is switched off (integer
// variables with integer solving disabled).
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelVariable {
    std::string name;
    double lb = 0.0;
    double ub = kInfinity;
    bool integer = false;
};

struct LinTerm {
    int var;
    double coef;
};

struct AffineExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;
};

struct LinearConstraint {
    std::vector<LinTerm> terms;
    char rel = '=';  // one of '<', '=', '>'
    double rhs = 0.0;
};

// t >= || v ||_2 with t a variable and v a vector of affine expressions.
struct SocConstraint {
    int t_var;
    std::vector<AffineExpr> arg;
};

struct OptModel {
    std::vector<ModelVariable> vars;
    std::vector<double> obj;  // aligned with vars; minimize
    double obj_offset = 0.0;
    std::vector<LinearConstraint> lin;
    std::vector<SocConstraint> soc;

    int add_var(std::string name, double lb = 0.0, double ub = kInfinity, bool integer = false) {
        vars.push_back({std::move(name), lb, ub, integer});
        obj.push_back(0.0);
        return static_cast<int>(vars.size()) - 1;
    }

    void add_con(std::vector<LinTerm> terms, char rel, double rhs) {
        lin.push_back({std::move(terms), rel, rhs});
    }

    int num_vars() const { return static_cast<int>(vars.size()); }
    bool has_integer() const {
        for (const auto& v : vars)
            if (v.integer) return true;
        return false;
    }

    // Checks index ranges and bound ordering; throws on violation.
    void validate() const {
        const int n = num_vars();
        if (static_cast<int>(obj.size()) != n)
            throw std::invalid_argument("OptModel: objective length mismatch");
        for (const auto& v : vars)
            if (v.lb > v.ub) throw std::invalid_argument("OptModel: variable '" + v.name +
                                                         "' has lb > ub");
        auto check_terms = [n](const std::vector<LinTerm>& ts) {
            for (const auto& t : ts)
                if (t.var < 0 || t.var >= n)
                    throw std::invalid_argument("OptModel: variable index out of range");
        };
        for (const auto& c : lin) {
            if (c.rel != '<' && c.rel != '=' && c.rel != '>')
                throw std::invalid_argument("OptModel: bad relation");
            check_terms(c.terms);
        }
        for (const auto& c : soc) {
            if (c.t_var < 0 || c.t_var >= n)
                throw std::invalid_argument("OptModel: SOC t-variable index out of range");
            for (const auto& a : c.arg) check_terms(a.terms);
        }
    }
};

struct SolveOptions {
    double feastol = 1e-9;
    double abstol = 1e-9;
    double reltol = 1e-10;
    int max_iters = 120;
    double time_limit_s = 0.0;
    bool enable_integer = false;
    long max_bnb_nodes = 100000;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Limit;
    std::vector<double> x;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double dual_objective = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
    int iterations = 0;
    std::string message;
};

namespace detail {

inline conic::Problem to_conic(const OptModel& model) {
    const int n = model.num_vars();
    conic::Problem P;
    P.c = conic::Vec::Zero(n);
    for (int j = 0; j < n; ++j) P.c[j] = model.obj[j];

    std::vector<conic::Triplet> ta, tg;
    std::vector<double> b, h;
    int arow = 0, grow = 0;

    auto push_row = [](std::vector<conic::Triplet>& out, int row,
                       const std::vector<LinTerm>& terms, double scale) {
        for (const auto& t : terms)
            if (t.coef != 0.0) out.emplace_back(row, t.var, scale * t.coef);
    };

    for (const auto& c : model.lin) {
        if (c.rel == '=') {
            push_row(ta, arow, c.terms, 1.0);
            b.push_back(c.rhs);
            ++arow;
        } else {
            const double sc = c.rel == '<' ? 1.0 : -1.0;
            push_row(tg, grow, c.terms, sc);
            h.push_back(sc * c.rhs);
            ++grow;
        }
    }
    for (int j = 0; j < n; ++j) {
        const auto& v = model.vars[j];
        if (std::isfinite(v.lb) && v.lb == v.ub) {
            ta.emplace_back(arow, j, 1.0);
            b.push_back(v.lb);
            ++arow;
            continue;
        }
        if (std::isfinite(v.ub)) {
            tg.emplace_back(grow, j, 1.0);
            h.push_back(v.ub);
            ++grow;
        }
        if (std::isfinite(v.lb)) {
            tg.emplace_back(grow, j, -1.0);
            h.push_back(-v.lb);
            ++grow;
        }
    }
    if (grow == 0 && model.soc.empty()) {
        // keep the cone nonempty
        h.push_back(1.0);
        ++grow;
    }
    P.cone.nonneg = grow;

    for (const auto& c : model.soc) {
        tg.emplace_back(grow, c.t_var, -1.0);
        h.push_back(0.0);
        ++grow;
        for (const auto& a : c.arg) {
            for (const auto& t : a.terms)
                if (t.coef != 0.0) tg.emplace_back(grow, t.var, -t.coef);
            h.push_back(a.constant);
            ++grow;
        }
        P.cone.soc.push_back(static_cast<int>(c.arg.size()) + 1);
    }

    P.A = conic::SpMat(arow, n);
    P.A.setFromTriplets(ta.begin(), ta.end());
    P.b = conic::Vec::Zero(arow);
    for (int i = 0; i < arow; ++i) P.b[i] = b[i];
    P.G = conic::SpMat(grow, n);
    P.G.setFromTriplets(tg.begin(), tg.end());
    P.h = conic::Vec::Zero(grow);
    for (int i = 0; i < grow; ++i) P.h[i] = h[i];
    return P;
}

inline SolveResult solve_continuous(const OptModel& model, const SolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    conic::Problem P = to_conic(model);
    conic::ConicSettings cs;
    cs.feastol = opts.feastol;
    cs.abstol = opts.abstol;
    cs.reltol = opts.reltol;
    cs.max_iters = opts.max_iters;
    cs.time_limit_s = opts.time_limit_s;
    const conic::ConicSolution c = conic::solve(P, cs);

    SolveResult r;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.iterations = c.iters;
    r.message = c.message;
    switch (c.status) {
        case conic::ConicStatus::Optimal: r.status = SolveStatus::Optimal; break;
        case conic::ConicStatus::PrimalInfeasible: r.status = SolveStatus::Infeasible; break;
        case conic::ConicStatus::DualInfeasible: r.status = SolveStatus::Unbounded; break;
        default: r.status = SolveStatus::Limit; break;
    }
    if (r.status == SolveStatus::Optimal || c.x.size() == model.num_vars()) {
        r.x.assign(c.x.data(), c.x.data() + c.x.size());
        // snap hairline bound violations onto the bounds
        for (int j = 0; j < model.num_vars(); ++j) {
            const auto& v = model.vars[j];
            if (r.x[j] < v.lb && r.x[j] > v.lb - 1e-6) r.x[j] = v.lb;
            if (r.x[j] > v.ub && r.x[j] < v.ub + 1e-6) r.x[j] = v.ub;
        }
        double obj = model.obj_offset;
        for (int j = 0; j < model.num_vars(); ++j) obj += model.obj[j] * r.x[j];
        r.objective = obj;
        r.dual_objective = c.dual_obj + model.obj_offset;
    }
    return r;
}

inline SolveResult solve_bnb(const OptModel& model, const SolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int> int_vars;
    for (int j = 0; j < model.num_vars(); ++j)
        if (model.vars[j].integer) int_vars.push_back(j);

    struct Node {
        std::vector<std::pair<int, std::pair<double, double>>> bounds;  // var -> (lb, ub)
        double bound;
        bool operator<(const Node& o) const { return bound > o.bound; }  // min-heap
    };
    std::priority_queue<Node> open;
    open.push({{}, -kInfinity});

    double incumbent = kInfinity;
    std::vector<double> best_x;
    long nodes = 0;
    bool limit_hit = false;

    SolveOptions lp_opts = opts;
    lp_opts.enable_integer = false;

    while (!open.empty()) {
        if (++nodes > opts.max_bnb_nodes) {
            limit_hit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        if (node.bound >= incumbent - 1e-9) continue;

        OptModel relaxed = model;
        for (auto& v : relaxed.vars) v.integer = false;
        for (const auto& [j, lu] : node.bounds) {
            relaxed.vars[j].lb = std::max(relaxed.vars[j].lb, lu.first);
            relaxed.vars[j].ub = std::min(relaxed.vars[j].ub, lu.second);
            if (relaxed.vars[j].lb > relaxed.vars[j].ub) goto infeasible_node;
        }
        {
            SolveResult lp = solve_continuous(relaxed, lp_opts);
            if (lp.status == SolveStatus::Infeasible) goto infeasible_node;
            if (lp.status != SolveStatus::Optimal) {
                limit_hit = true;
                continue;
            }
            if (lp.objective >= incumbent - 1e-9) continue;

            int branch_var = -1;
            double worst_frac = 1e-6;
            for (int j : int_vars) {
                const double f = std::abs(lp.x[j] - std::round(lp.x[j]));
                if (f > worst_frac) {
                    worst_frac = f;
                    branch_var = j;
                }
            }
            if (branch_var < 0) {
                // integral point
                std::vector<double> xi = lp.x;
                for (int j : int_vars) xi[j] = std::round(xi[j]);
                double obj = model.obj_offset;
                for (int j = 0; j < model.num_vars(); ++j) obj += model.obj[j] * xi[j];
                if (obj < incumbent) {
                    incumbent = obj;
                    best_x = std::move(xi);
                }
                continue;
            }
            const double val = lp.x[branch_var];
            Node down = node, up = node;
            down.bounds.push_back({branch_var, {-kInfinity, std::floor(val)}});
            down.bound = lp.objective;
            up.bounds.push_back({branch_var, {std::floor(val) + 1.0, kInfinity}});
            up.bound = lp.objective;
            open.push(std::move(down));
            open.push(std::move(up));
        }
    infeasible_node:;
    }

    SolveResult r;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!best_x.empty()) {
        r.status = limit_hit ? SolveStatus::Limit : SolveStatus::Optimal;
        r.x = best_x;
        r.objective = incumbent;
        r.dual_objective = incumbent;
        if (limit_hit) r.message = "node limit reached; best incumbent returned";
    } else if (limit_hit) {
        r.status = SolveStatus::Limit;
        r.message = "node limit reached without incumbent";
    } else {
        r.status = SolveStatus::Infeasible;
        r.message = "no feasible integer point";
    }
    return r;
}

}  // namespace detail

// Solves the model. Deterministic: the same model and options produce the
// same status and objective. Throws CapabilityError for integer models unless
// opts.enable_integer is set.
inline SolveResult solve(const OptModel& model, const SolveOptions& opts = {}) {
    model.validate();
    if (model.has_integer()) {
        if (!opts.enable_integer)
            throw CapabilityError(
                "model has integer variables and integer solving is disabled "
                "(set SolveOptions::enable_integer)");
        return detail::solve_bnb(model, opts);
    }
    return detail::solve_continuous(model, opts);
}

// Largest absolute violation of the model's linear constraints at x.
inline double linear_violation(const OptModel& model, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& c : model.lin) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coef * x[t.var];
        double v = 0.0;
        if (c.rel == '=') v = std::abs(lhs - c.rhs);
        if (c.rel == '<') v = std::max(0.0, lhs - c.rhs);
        if (c.rel == '>') v = std::max(0.0, c.rhs - lhs);
        worst = std::max(worst, v);
    }
    return worst;
}

// Model export in the industry-standard LP text format (for cross-checks with
// external solvers). SOC constraints are not representable there.
inline std::string write_lp(const OptModel& model) {
    if (!model.soc.empty())
        throw std::invalid_argument("write_lp: model has second-order cone constraints");
    std::ostringstream os;
    os.precision(17);
    auto term = [&](double coef, const std::string& name, bool first) {
        if (coef >= 0.0 && !first) os << " + ";
        if (coef < 0.0) os << (first ? "- " : " - ");
        os << std::abs(coef) << " " << name;
    };
    os << "Minimize\n obj:";
    bool first = true;
    for (int j = 0; j < model.num_vars(); ++j) {
        if (model.obj[j] == 0.0) continue;
        os << (first ? " " : "");
        term(model.obj[j], model.vars[j].name, first);
        first = false;
    }
    if (first) os << " 0 " << model.vars.at(0).name;
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < model.lin.size(); ++i) {
        const auto& c = model.lin[i];
        os << " c" << i << ":";
        bool f = true;
        for (const auto& t : c.terms) {
            if (t.coef == 0.0) continue;
            os << (f ? " " : "");
            term(t.coef, model.vars[t.var].name, f);
            f = false;
        }
        if (f) os << " 0 " << model.vars.at(0).name;
        os << (c.rel == '<' ? " <= " : c.rel == '>' ? " >= " : " = ") << c.rhs << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : model.vars) {
        if (v.lb == 0.0 && v.ub == kInfinity) continue;
        if (!std::isfinite(v.lb) && !std::isfinite(v.ub)) {
            os << " " << v.name << " free\n";
        } else {
            os << " ";
            if (std::isfinite(v.lb)) os << v.lb << " <= ";
            else os << "-inf <= ";
            os << v.name;
            if (std::isfinite(v.ub)) os << " <= " << v.ub;
            os << "\n";
        }
    }
    bool any_int = false;
    for (const auto& v : model.vars) any_int |= v.integer;
    if (any_int) {
        os << "Generals\n";
        for (const auto& v : model.vars)
            if (v.integer) os << " " << v.name << "\n";
    }
    os << "End\n";
    return os.str();
}

}  // namespace fhsap

#endif  // FHSAP_MODEL_HPP
