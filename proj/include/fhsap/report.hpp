// Benchmark reporting: per-instance rows mirroring the reference tables
// (per-relaxation objective and CPU time, rounded cost, Gap-LP1 / Gap-LP3,
// exact optimum when enumerable, robust comparison fields), with fixed-order
// CSV and a JSON mirror of the same fields.

#ifndef FHSAP_REPORT_HPP
#define FHSAP_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fhsap/exact.hpp"
#include "fhsap/formulations.hpp"
#include "fhsap/robust.hpp"
#include "fhsap/rounding.hpp"

namespace fhsap {

enum class Relaxation { lp1, lp2, lp2p, lp3 };

inline const char* to_string(Relaxation r) {
    switch (r) {
        case Relaxation::lp1: return "lp1";
        case Relaxation::lp2: return "lp2";
        case Relaxation::lp2p: return "lp2p";
        case Relaxation::lp3: return "lp3";
    }
    return "?";
}

inline std::optional<Relaxation> parse_relaxation(const std::string& s) {
    if (s == "lp1") return Relaxation::lp1;
    if (s == "lp2") return Relaxation::lp2;
    if (s == "lp2p") return Relaxation::lp2p;
    if (s == "lp3") return Relaxation::lp3;
    return std::nullopt;
}

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stable cell formatting: %.10g round-trips our value range and keeps CSV
// bytes identical across reruns.
inline std::string cell(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline nlohmann::json jcell(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace detail

struct RelaxationRun {
    bool solved = false;
    double v = detail::kNaN;        // relaxation optimum
    double seconds = detail::kNaN;  // solve wall time
    double w = detail::kNaN;        // best rounded cost
    std::string note;               // N/A reason when not solved
};

// One line of the random-instance benchmark.
struct BenchRow {
    std::string name;
    int n = 0, k = 0;
    std::string hub_cost;
    std::uint64_t seed = 0;
    int trials = 0;
    RelaxationRun lp1, lp2, lp3;
    double opt = detail::kNaN;  // enumeration optimum when within cap

    double gap_vs(double w, const RelaxationRun& base) const {
        if (std::isnan(w) || !base.solved || base.v == 0.0) return detail::kNaN;
        return (w / base.v - 1.0) * 100.0;
    }
    double gap1(const RelaxationRun& r) const { return gap_vs(r.w, lp1); }
    double gap3(const RelaxationRun& r) const { return gap_vs(r.w, lp3); }
};

struct BenchParams {
    int trials = 5000;
    std::uint64_t seed = 0;
    long long lp1_cap = 2'000'000;       // route-variable cap for LP1
    std::uint64_t enum_cap = 1'000'000;  // k^n cap for the exact column (0 = skip)
    SolveOptions solve_opts;
};

// Solves LP1/LP2/LP3 on one instance, rounds each fractional solution
// best-of-N, and fills a bench row. A relaxation that fails (size guard,
// solver trouble) gets an N/A note; the row is still produced.
inline BenchRow run_bench_row(const std::string& name, const Instance& inst,
                              const std::string& hub_cost, const BenchParams& params) {
    BenchRow row;
    row.name = name;
    row.n = inst.n;
    row.k = inst.k;
    row.hub_cost = hub_cost;
    row.seed = params.seed;
    row.trials = params.trials;

    auto round_cost = [&](const Assignment& frac, std::uint64_t stream) {
        Assignment x = frac;
        if (snap_integral(x)) return eval_cost(inst, x).total;
        return gra_best_of(inst, frac, params.trials, derive_seed(params.seed, stream)).cost.total;
    };

    try {
        Milp1Options o1;
        o1.max_route_vars = params.lp1_cap;
        Milp1Model m1 = build_milp1(inst, true, o1);
        SolveResult r = solve(m1.model, params.solve_opts);
        if (r.status == SolveStatus::Optimal) {
            row.lp1.solved = true;
            row.lp1.v = r.objective;
            row.lp1.seconds = r.seconds;
            row.lp1.w = round_cost(extract_assignment(r, m1.map), 1);
        } else {
            row.lp1.note = to_string(r.status);
        }
    } catch (const SizeGuardError&) {
        row.lp1.note = "size guard";
    } catch (const std::exception& e) {
        row.lp1.note = e.what();
    }

    auto flow_run = [&](Relaxation which, RelaxationRun& out, std::uint64_t stream) {
        try {
            FlowModel fm = which == Relaxation::lp2 ? build_milp2(inst, true)
                                                    : build_milp3(inst, true);
            SolveResult r = solve(fm.model, params.solve_opts);
            if (r.status == SolveStatus::Optimal) {
                out.solved = true;
                out.v = r.objective;
                out.seconds = r.seconds;
                out.w = round_cost(extract_assignment(r, fm.map), stream);
            } else {
                out.note = to_string(r.status);
            }
        } catch (const std::exception& e) {
            out.note = e.what();
        }
    };
    flow_run(Relaxation::lp2, row.lp2, 2);
    flow_run(Relaxation::lp3, row.lp3, 3);

    if (params.enum_cap > 0) {
        try {
            row.opt = brute_force(inst, params.enum_cap).cost.total;
        } catch (const EnumerationCapError&) {
        }
    }
    return row;
}

// Fixed CSV column order for the bench report. JSON mirrors these fields
// one-to-one.
inline std::string bench_csv_header() {
    return "name,n,k,hub_cost,seed,trials,"
           "v_lp1,cpu_lp1,w_lp1,gap1_lp1,"
           "v_lp2,cpu_lp2,w_lp2,gap1_lp2,gap3_lp2,"
           "v_lp3,cpu_lp3,w_lp3,gap1_lp3,gap3_lp3,opt";
}

inline std::string bench_csv_row(const BenchRow& r, bool with_times) {
    using detail::cell;
    std::ostringstream os;
    const double t1 = with_times ? r.lp1.seconds : detail::kNaN;
    const double t2 = with_times ? r.lp2.seconds : detail::kNaN;
    const double t3 = with_times ? r.lp3.seconds : detail::kNaN;
    os << r.name << ',' << r.n << ',' << r.k << ',' << r.hub_cost << ',' << r.seed << ','
       << r.trials << ',' << cell(r.lp1.v) << ',' << cell(t1) << ',' << cell(r.lp1.w) << ','
       << cell(r.gap1(r.lp1)) << ',' << cell(r.lp2.v) << ',' << cell(t2) << ',' << cell(r.lp2.w)
       << ',' << cell(r.gap1(r.lp2)) << ',' << cell(r.gap3(r.lp2)) << ',' << cell(r.lp3.v) << ','
       << cell(t3) << ',' << cell(r.lp3.w) << ',' << cell(r.gap1(r.lp3)) << ','
       << cell(r.gap3(r.lp3)) << ',' << cell(r.opt);
    return os.str();
}

inline nlohmann::json bench_json_row(const BenchRow& r, bool with_times) {
    using detail::jcell;
    nlohmann::json j;
    j["name"] = r.name;
    j["n"] = r.n;
    j["k"] = r.k;
    j["hub_cost"] = r.hub_cost;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["v_lp1"] = jcell(r.lp1.v);
    j["cpu_lp1"] = jcell(with_times ? r.lp1.seconds : detail::kNaN);
    j["w_lp1"] = jcell(r.lp1.w);
    j["gap1_lp1"] = jcell(r.gap1(r.lp1));
    j["v_lp2"] = jcell(r.lp2.v);
    j["cpu_lp2"] = jcell(with_times ? r.lp2.seconds : detail::kNaN);
    j["w_lp2"] = jcell(r.lp2.w);
    j["gap1_lp2"] = jcell(r.gap1(r.lp2));
    j["gap3_lp2"] = jcell(r.gap3(r.lp2));
    j["v_lp3"] = jcell(r.lp3.v);
    j["cpu_lp3"] = jcell(with_times ? r.lp3.seconds : detail::kNaN);
    j["w_lp3"] = jcell(r.lp3.w);
    j["gap1_lp3"] = jcell(r.gap1(r.lp3));
    j["gap3_lp3"] = jcell(r.gap3(r.lp3));
    j["opt"] = jcell(r.opt);
    return j;
}

// One line of the robust-vs-nominal comparison.
struct RobustRow {
    std::string name;
    int n = 0, k = 0;
    double budget = 0.0;
    double p = 2.0;
    std::uint64_t seed = 0;
    double time_nominal = detail::kNaN;  // Time1
    double time_robust = detail::kNaN;   // Time2
    double f_nom_nominal = detail::kNaN; // Ftilde(x nominal)
    double f_nom_robust = detail::kNaN;  // Ftilde(x robust)
    double gap1 = detail::kNaN;
    double f_wc_nominal = detail::kNaN;  // Fhat(x nominal)
    double f_wc_robust = detail::kNaN;   // Fhat(x robust)
    double gap2 = detail::kNaN;
    bool robust_integral = false;
};

// Runs the nominal pipeline (LP3 + geometric rounding) and the robust
// pipeline on the same instance and fills a comparison row.
inline RobustRow run_robust_row(const std::string& name, const Instance& inst,
                                const UncertaintySet& set, int trials, std::uint64_t seed,
                                const SolveOptions& opts = {}) {
    RobustRow row;
    row.name = name;
    row.n = inst.n;
    row.k = inst.k;
    row.budget = set.budget;
    row.p = set.p;
    row.seed = seed;

    FlowModel lp3 = build_milp3(inst, true);
    SolveResult r3 = solve(lp3.model, opts);
    if (r3.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("nominal pipeline: LP3 status ") +
                                 to_string(r3.status));
    Assignment frac = extract_assignment(r3, lp3.map);
    Assignment nominal_choice;
    if (snap_integral(frac)) {
        nominal_choice = frac;
    } else {
        nominal_choice =
            gra_best_of(inst, frac, trials, derive_seed(seed, 1)).assignment;
    }
    row.time_nominal = r3.seconds;

    RobustSolveOutcome rob = robust_solve(inst, set, trials, derive_seed(seed, 2), opts);
    row.time_robust = rob.solve_seconds;
    row.robust_integral = rob.was_integral;

    const RobustEval en = worst_case_cost(inst, nominal_choice, set);
    const RobustEval er = rob.eval;
    row.f_nom_nominal = en.nominal_cost;
    row.f_nom_robust = er.nominal_cost;
    row.f_wc_nominal = en.worst_cost;
    row.f_wc_robust = er.worst_cost;
    const GapPair g = gaps(inst, set, nominal_choice, rob.assignment);
    row.gap1 = g.gap1;
    row.gap2 = g.gap2;
    return row;
}

inline std::string robust_csv_header() {
    return "name,n,k,budget,p,seed,time1,time2,"
           "ftilde_nominal,ftilde_robust,gap1,fhat_nominal,fhat_robust,gap2,robust_integral";
}

inline std::string robust_csv_row(const RobustRow& r, bool with_times) {
    using detail::cell;
    std::ostringstream os;
    os << r.name << ',' << r.n << ',' << r.k << ',' << cell(r.budget) << ',' << cell(r.p) << ','
       << r.seed << ',' << cell(with_times ? r.time_nominal : detail::kNaN) << ','
       << cell(with_times ? r.time_robust : detail::kNaN) << ',' << cell(r.f_nom_nominal) << ','
       << cell(r.f_nom_robust) << ',' << cell(r.gap1) << ',' << cell(r.f_wc_nominal) << ','
       << cell(r.f_wc_robust) << ',' << cell(r.gap2) << ',' << (r.robust_integral ? 1 : 0);
    return os.str();
}

inline nlohmann::json robust_json_row(const RobustRow& r, bool with_times) {
    using detail::jcell;
    nlohmann::json j;
    j["name"] = r.name;
    j["n"] = r.n;
    j["k"] = r.k;
    j["budget"] = r.budget;
    j["p"] = r.p;
    j["seed"] = r.seed;
    j["time1"] = jcell(with_times ? r.time_nominal : detail::kNaN);
    j["time2"] = jcell(with_times ? r.time_robust : detail::kNaN);
    j["ftilde_nominal"] = jcell(r.f_nom_nominal);
    j["ftilde_robust"] = jcell(r.f_nom_robust);
    j["gap1"] = jcell(r.gap1);
    j["fhat_nominal"] = jcell(r.f_wc_nominal);
    j["fhat_robust"] = jcell(r.f_wc_robust);
    j["gap2"] = jcell(r.gap2);
    j["robust_integral"] = r.robust_integral;
    return j;
}

}  // namespace fhsap

#endif  // FHSAP_REPORT_HPP
