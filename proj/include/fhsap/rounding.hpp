// Geometric rounding for fractional assignments.
//
// One random point u is drawn uniformly on the standard simplex and shared by
// every terminal: row x_i rounds to vertex i* where i* minimizes u_s / x_is.
// That argmin locates u inside the region A_{x,i*}, the sub-polyhedron of the
// simplex with vertices {x} and every unit vertex except v_{i*}; the shared u
// is what couples the rows and drives the distance-contraction property.

#ifndef FHSAP_ROUNDING_HPP
#define FHSAP_ROUNDING_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fhsap/formulations.hpp"
#include "fhsap/instance.hpp"
#include "fhsap/rng.hpp"

namespace fhsap {

struct SimplexPoint {
    std::vector<double> v;

    int dim() const { return static_cast<int>(v.size()); }
    double operator[](int i) const { return v[i]; }
};

inline std::vector<std::string> validate(const SimplexPoint& p) {
    std::vector<std::string> errs;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.v.size(); ++i) {
        if (!(p.v[i] >= 0.0)) errs.push_back("negative coordinate " + std::to_string(i));
        sum += p.v[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) errs.push_back("coordinates sum to " + std::to_string(sum));
    return errs;
}

// Uniform draw on the (k-1)-simplex: k standard exponentials, normalized
// (the flat Dirichlet).
inline SimplexPoint sample_simplex(int k, Rng& rng) {
    if (k < 1) throw std::invalid_argument("sample_simplex: k must be >= 1");
    SimplexPoint p;
    p.v.resize(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        p.v[i] = rng.exponential();
        sum += p.v[i];
    }
    for (int i = 0; i < k; ++i) p.v[i] /= sum;
    return p;
}

// d(x, y) = sum_s |x_s - y_s|.
inline double simplex_distance(const SimplexPoint& x, const SimplexPoint& y) {
    double d = 0.0;
    for (int s = 0; s < x.dim(); ++s) d += std::abs(x[s] - y[s]);
    return d;
}

// Coordinates below this are treated as exactly zero in the region ratios.
inline constexpr double kRegionZero = 1e-15;

// Hub index i with u in A_{x,i}: the argmin of u_s / x_s. Coordinates with
// x_s ~ 0 never win (their region is empty). Exact ratio ties, a measure-zero
// event, go to the lowest hub index so runs are reproducible.
inline int classify_region(const SimplexPoint& x, const SimplexPoint& u) {
    int arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < x.dim(); ++s) {
        if (x[s] <= kRegionZero) continue;
        const double ratio = u[s] / x[s];
        if (ratio < best) {
            best = ratio;
            arg = s;
        }
    }
    if (arg < 0) throw std::invalid_argument("classify_region: x has no positive coordinate");
    return arg;
}

// Rounds every row of a fractional assignment with the single shared u.
inline Assignment gra_round(const Assignment& frac, const SimplexPoint& u) {
    const int n = frac.x.rows(), k = frac.x.cols();
    Assignment out;
    out.x = Mat(n, k);
    out.integral = true;
    SimplexPoint row;
    row.v.resize(k);
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < k; ++s) row.v[s] = frac.x(i, s);
        out.x(i, classify_region(row, u)) = 1.0;
    }
    return out;
}

struct RoundingOutcome {
    Assignment assignment;
    CostBreakdown cost;
    int trial = 0;    // index of the winning trial
    SimplexPoint u;   // the draw that produced it
};

// Best-of-N rounding with a custom score. Trial t draws its u from an rng
// seeded with derive_seed(seed, t), so trials are independent and the whole
// search is reproducible; the minimum is taken by (score, trial index).
template <typename ScoreFn>
RoundingOutcome gra_best_of_scored(const Instance& inst, const Assignment& frac, int trials,
                                   std::uint64_t seed, ScoreFn&& score) {
    if (trials < 1) throw std::invalid_argument("gra_best_of: trials must be >= 1");
    RoundingOutcome best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        SimplexPoint u = sample_simplex(inst.k, rng);
        Assignment rounded = gra_round(frac, u);
        const double sc = score(rounded);
        if (sc < best_score) {
            best_score = sc;
            best.assignment = std::move(rounded);
            best.trial = t;
            best.u = std::move(u);
        }
    }
    best.cost = eval_cost(inst, best.assignment);
    return best;
}

// Runs `trials` independent u-draws and returns the cheapest rounded
// assignment by true allocation cost.
inline RoundingOutcome gra_best_of(const Instance& inst, const Assignment& frac, int trials,
                                   std::uint64_t seed) {
    return gra_best_of_scored(inst, frac, trials, seed,
                              [&inst](const Assignment& a) { return eval_cost(inst, a).total; });
}

}  // namespace fhsap

#endif  // FHSAP_ROUNDING_HPP
