// FHSAP instance data model: demands, terminal<->hub costs, inter-hub costs,
// random generation, and the .fhsap.json serialization format.
//
// JSON schema (top level, all matrices row-major arrays of arrays):
//   { "n": int, "k": int, "demand": [[..]], "cost_out": [[..]],
//     "cost_in": [[..]], "cost_hub": [[..]] }

#ifndef FHSAP_INSTANCE_HPP
#define FHSAP_INSTANCE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fhsap/matrix.hpp"
#include "fhsap/rng.hpp"

namespace fhsap {

// A problem instance with k fixed hubs and n terminals. demand(i,j) is the
// flow shipped from terminal i to terminal j; cost_out(i,s) prices one unit
// from terminal i to hub s, cost_in(j,t) one unit from hub t down to terminal
// j, and cost_hub(s,t) one unit on the inter-hub leg. cost_hub must be
// symmetric with a zero diagonal. Instances are immutable by convention once
// built and are safe to share across threads.
struct Instance {
    int n = 0;
    int k = 0;
    Mat demand;    // n x n
    Mat cost_out;  // n x k
    Mat cost_in;   // n x k
    Mat cost_hub;  // k x k

    bool operator==(const Instance&) const = default;
};

// A terminal-to-hub allocation. Rows of x are points on the k-1 simplex;
// integral assignments have exactly one unit entry per row.
struct Assignment {
    Mat x;  // n x k
    bool integral = false;

    bool operator==(const Assignment&) const = default;
};

inline Assignment assignment_from_hubs(const std::vector<int>& hub_of, int k) {
    Assignment a;
    a.x = Mat(static_cast<int>(hub_of.size()), k);
    a.integral = true;
    for (int i = 0; i < static_cast<int>(hub_of.size()); ++i) {
        if (hub_of[i] < 0 || hub_of[i] >= k)
            throw std::invalid_argument("assignment_from_hubs: hub index out of range");
        a.x(i, hub_of[i]) = 1.0;
    }
    return a;
}

// Hub map of an integral assignment; throws on fractional input.
inline std::vector<int> hubs_of(const Assignment& a) {
    if (!a.integral) throw std::invalid_argument("hubs_of: assignment is fractional");
    std::vector<int> h(a.x.rows(), -1);
    for (int i = 0; i < a.x.rows(); ++i) {
        for (int s = 0; s < a.x.cols(); ++s) {
            if (a.x(i, s) == 1.0) {
                h[i] = s;
                break;
            }
        }
        if (h[i] < 0) throw std::invalid_argument("hubs_of: row without unit entry");
    }
    return h;
}

// Returns every invariant violation, each naming the offending index.
// An empty result means the instance is valid.
inline std::vector<std::string> validate(const Instance& inst) {
    std::vector<std::string> errs;
    auto add = [&errs](const std::string& m) { errs.push_back(m); };
    std::ostringstream os;

    if (inst.n < 1) add("n must be >= 1");
    if (inst.k < 1) add("k must be >= 1");
    auto check_dims = [&](const Mat& m, int r, int c, const char* name) {
        if (m.rows() != r || m.cols() != c) {
            std::ostringstream o;
            o << name << " has shape " << m.rows() << "x" << m.cols() << ", expected " << r << "x"
              << c;
            add(o.str());
            return false;
        }
        return true;
    };
    const bool d_ok = check_dims(inst.demand, inst.n, inst.n, "demand");
    const bool o_ok = check_dims(inst.cost_out, inst.n, inst.k, "cost_out");
    const bool i_ok = check_dims(inst.cost_in, inst.n, inst.k, "cost_in");
    const bool h_ok = check_dims(inst.cost_hub, inst.k, inst.k, "cost_hub");

    auto check_nonneg = [&](const Mat& m, const char* name, bool ok) {
        if (!ok) return;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                if (!(m(i, j) >= 0.0)) {
                    std::ostringstream o;
                    o << "negative " << name << " at (" << i << "," << j << ")";
                    add(o.str());
                }
    };
    check_nonneg(inst.demand, "demand", d_ok);
    check_nonneg(inst.cost_out, "cost_out", o_ok);
    check_nonneg(inst.cost_in, "cost_in", i_ok);
    check_nonneg(inst.cost_hub, "cost_hub", h_ok);

    if (h_ok) {
        for (int s = 0; s < inst.k; ++s) {
            if (inst.cost_hub(s, s) != 0.0) {
                std::ostringstream o;
                o << "nonzero cost_hub diagonal at (" << s << "," << s << ")";
                add(o.str());
            }
            for (int t = s + 1; t < inst.k; ++t)
                if (inst.cost_hub(s, t) != inst.cost_hub(t, s)) {
                    std::ostringstream o;
                    o << "asymmetric cost_hub at (" << s << "," << t << ")";
                    add(o.str());
                }
        }
    }
    return errs;
}

inline void require_valid(const Instance& inst) {
    auto errs = validate(inst);
    if (!errs.empty()) throw std::invalid_argument("invalid instance: " + errs.front());
}

// Row-sum tolerance for assignments.
inline constexpr double kRowSumTol = 1e-9;

inline std::vector<std::string> validate(const Assignment& a) {
    std::vector<std::string> errs;
    for (int i = 0; i < a.x.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.x.cols(); ++j) {
            const double v = a.x(i, j);
            if (!(v >= 0.0 && v <= 1.0)) {
                std::ostringstream o;
                o << "entry out of [0,1] at (" << i << "," << j << ")";
                errs.push_back(o.str());
            }
            if (a.integral && v != 0.0 && v != 1.0) {
                std::ostringstream o;
                o << "non-binary entry in integral assignment at (" << i << "," << j << ")";
                errs.push_back(o.str());
            }
            s += v;
        }
        if (std::abs(s - 1.0) > kRowSumTol) {
            std::ostringstream o;
            o << "row " << i << " sums to " << s;
            errs.push_back(o.str());
        }
    }
    return errs;
}

struct Totals {
    std::vector<double> origin;       // O[i] = sum_j d(i,j)
    std::vector<double> destination;  // D[i] = sum_j d(j,i)
};

inline Totals totals(const Instance& inst) {
    Totals t;
    t.origin.assign(inst.n, 0.0);
    t.destination.assign(inst.n, 0.0);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) {
            t.origin[i] += inst.demand(i, j);
            t.destination[j] += inst.demand(i, j);
        }
    return t;
}

// Distribution of the off-diagonal inter-hub costs used by the generator.
struct HubCostSpec {
    enum class Kind { Constant, Uniform };
    Kind kind = Kind::Constant;
    double a = 0.0;  // constant value, or lower bound
    double b = 0.0;  // upper bound (Uniform only)

    static HubCostSpec constant(double c) { return {Kind::Constant, c, c}; }
    static HubCostSpec uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }

    // Grammar: "const:<c>" or "uniform:<a>:<b>".
    static HubCostSpec parse(const std::string& text) {
        auto bad = [&text]() {
            return std::invalid_argument("bad hub-cost spec '" + text +
                                         "' (want const:<c> or uniform:<a>:<b>)");
        };
        const auto colon = text.find(':');
        if (colon == std::string::npos) throw bad();
        const std::string head = text.substr(0, colon);
        try {
            if (head == "const") {
                return constant(std::stod(text.substr(colon + 1)));
            }
            if (head == "uniform") {
                const auto rest = text.substr(colon + 1);
                const auto colon2 = rest.find(':');
                if (colon2 == std::string::npos) throw bad();
                return uniform(std::stod(rest.substr(0, colon2)), std::stod(rest.substr(colon2 + 1)));
            }
        } catch (const std::invalid_argument&) {
            throw bad();
        }
        throw bad();
    }

    std::string str() const {
        std::ostringstream o;
        if (kind == Kind::Constant)
            o << "const:" << a;
        else
            o << "uniform:" << a << ":" << b;
        return o.str();
    }
};

// Random instance following the benchmark protocol: demands i.i.d. U[0,100]
// with a zero diagonal (diagonal entries are not drawn), terminal<->hub costs
// i.i.d. U[1,11] with cost_in = cost_out, inter-hub costs drawn per `spec` on
// the upper triangle and mirrored. Draw order (one xoshiro256++ stream seeded
// with `seed`): demand row-major skipping the diagonal, then cost_out
// row-major, then cost_hub upper triangle row-major.
inline Instance generate_random(int n, int k, const HubCostSpec& spec, std::uint64_t seed) {
    if (n < 1 || k < 1) throw std::invalid_argument("generate_random: need n >= 1 and k >= 1");
    if (spec.a < 0.0) throw std::invalid_argument("generate_random: negative hub-cost bound");
    if (spec.kind == HubCostSpec::Kind::Uniform && spec.a > spec.b)
        throw std::invalid_argument("generate_random: hub-cost bounds with a > b");

    Rng rng(seed);
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.demand = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) inst.demand(i, j) = rng.uniform(0.0, 100.0);

    inst.cost_out = Mat(n, k);
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < k; ++s) inst.cost_out(i, s) = rng.uniform(1.0, 11.0);
    inst.cost_in = inst.cost_out;

    inst.cost_hub = Mat(k, k);
    for (int s = 0; s < k; ++s)
        for (int t = s + 1; t < k; ++t) {
            const double c =
                spec.kind == HubCostSpec::Kind::Constant ? spec.a : rng.uniform(spec.a, spec.b);
            inst.cost_hub(s, t) = c;
            inst.cost_hub(t, s) = c;
        }
    return inst;
}

namespace detail {

inline nlohmann::json mat_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat mat_from_json(const nlohmann::json& j, int rows, int cols, const std::string& field) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw std::runtime_error("field '" + field + "': expected " + std::to_string(rows) +
                                 " rows, got " + std::to_string(j.is_array() ? j.size() : 0));
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw std::runtime_error("field '" + field + "': row " + std::to_string(i) +
                                     " does not have " + std::to_string(cols) + " columns");
        for (int jj = 0; jj < cols; ++jj) {
            const auto& v = row.at(jj);
            if (!v.is_number())
                throw std::runtime_error("field '" + field + "': non-numeric entry at (" +
                                         std::to_string(i) + "," + std::to_string(jj) + ")");
            m(i, jj) = v.get<double>();
        }
    }
    return m;
}

}  // namespace detail

inline std::string to_json(const Instance& inst) {
    nlohmann::json j;
    j["n"] = inst.n;
    j["k"] = inst.k;
    j["demand"] = detail::mat_to_json(inst.demand);
    j["cost_out"] = detail::mat_to_json(inst.cost_out);
    j["cost_in"] = detail::mat_to_json(inst.cost_in);
    j["cost_hub"] = detail::mat_to_json(inst.cost_hub);
    return j.dump(2);
}

// Parses and validates; throws std::runtime_error naming the offending field
// or invariant.
inline Instance from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("instance parse error: ") + e.what());
    }
    for (const char* field : {"n", "k", "demand", "cost_out", "cost_in", "cost_hub"})
        if (!j.contains(field))
            throw std::runtime_error(std::string("instance missing field '") + field + "'");
    Instance inst;
    if (!j["n"].is_number_integer() || !j["k"].is_number_integer())
        throw std::runtime_error("fields 'n' and 'k' must be integers");
    inst.n = j["n"].get<int>();
    inst.k = j["k"].get<int>();
    if (inst.n < 1 || inst.k < 1) throw std::runtime_error("fields 'n' and 'k' must be >= 1");
    inst.demand = detail::mat_from_json(j["demand"], inst.n, inst.n, "demand");
    inst.cost_out = detail::mat_from_json(j["cost_out"], inst.n, inst.k, "cost_out");
    inst.cost_in = detail::mat_from_json(j["cost_in"], inst.n, inst.k, "cost_in");
    inst.cost_hub = detail::mat_from_json(j["cost_hub"], inst.k, inst.k, "cost_hub");
    auto errs = validate(inst);
    if (!errs.empty()) throw std::runtime_error("instance invariant violated: " + errs.front());
    return inst;
}

}  // namespace fhsap

#endif  // FHSAP_INSTANCE_HPP
