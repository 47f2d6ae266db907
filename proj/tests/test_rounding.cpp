#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fhsap/rounding.hpp"
#include "test_support.hpp"

using namespace fhsap;
using fhsap::test::worked_2x2;

namespace {

SimplexPoint pt(std::vector<double> v) { return SimplexPoint{std::move(v)}; }

}  // namespace

TEST_CASE("point simplex always returns 1.0") {
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
        const SimplexPoint p = sample_simplex(1, rng);
        REQUIRE(p.dim() == 1);
        REQUIRE(p[0] == 1.0);
    }
}

TEST_CASE("simplex draws satisfy the invariants") {
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        const SimplexPoint p = sample_simplex(4, rng);
        REQUIRE(validate(p).empty());
    }
}

TEST_CASE("k=2 first coordinate is uniform (Kolmogorov-Smirnov at 1%)") {
    const int N = 100000;
    Rng rng(3);
    std::vector<double> xs(N);
    for (int i = 0; i < N; ++i) xs[i] = sample_simplex(2, rng)[0];
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < N; ++i) {
        d = std::max(d, std::abs((i + 1.0) / N - xs[i]));
        d = std::max(d, std::abs(xs[i] - static_cast<double>(i) / N));
    }
    const double crit = 1.628 / std::sqrt(static_cast<double>(N));  // alpha = 0.01
    REQUIRE(d < crit);
}

TEST_CASE("region lookup on the worked point") {
    // ratios (1.667, 1.111, 0.667) -> region of the third hub
    REQUIRE(classify_region(pt({0.2, 0.3, 0.5}), pt({1. / 3, 1. / 3, 1. / 3})) == 2);
}

TEST_CASE("region lookup satisfies the barycentric decomposition") {
    Rng rng(4);
    for (int rep = 0; rep < 2000; ++rep) {
        const int k = 2 + static_cast<int>(rng.below(4));
        const SimplexPoint x = sample_simplex(k, rng);
        const SimplexPoint u = sample_simplex(k, rng);
        const int i = classify_region(x, u);
        // u = lambda x + sum_{s != i} mu_s v_s with lambda = u_i / x_i
        const double lambda = u[i] / x[i];
        double total = lambda;
        for (int s = 0; s < k; ++s) {
            if (s == i) continue;
            const double mu = u[s] - lambda * x[s];
            REQUIRE(mu >= -1e-12);
            total += mu;
        }
        REQUIRE(total == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("a vertex point owns the whole simplex") {
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const SimplexPoint u = sample_simplex(3, rng);
        REQUIRE(classify_region(pt({0, 1, 0}), u) == 1);
    }
}

TEST_CASE("exact ratio ties break to the lowest hub index") {
    REQUIRE(classify_region(pt({0.5, 0.5}), pt({0.5, 0.5})) == 0);
}

TEST_CASE("rounding keeps integral rows for any u") {
    const Assignment a = assignment_from_hubs({0, 1, 1, 0}, 2);
    Rng rng(6);
    for (int rep = 0; rep < 50; ++rep) {
        const Assignment r = gra_round(a, sample_simplex(2, rng));
        REQUIRE(r == a);
    }
}

TEST_CASE("identical fractional rows round identically under the shared u") {
    Assignment a;
    a.x = Mat(3, 3);
    for (int i = 0; i < 3; ++i) {
        a.x(i, 0) = 0.2;
        a.x(i, 1) = 0.5;
        a.x(i, 2) = 0.3;
    }
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const Assignment r = gra_round(a, sample_simplex(3, rng));
        for (int i = 1; i < 3; ++i)
            for (int s = 0; s < 3; ++s) REQUIRE(r.x(i, s) == r.x(0, s));
    }
}

TEST_CASE("k=2 worked rounding example") {
    Assignment a;
    a.x = Mat(1, 2);
    a.x(0, 0) = 0.3;
    a.x(0, 1) = 0.7;
    const Assignment r = gra_round(a, pt({0.5, 0.5}));
    // ratios (1.667, 0.714) -> hub 1
    REQUIRE(r.x(0, 1) == 1.0);
}

TEST_CASE("best-of-one equals a single rounding with the first trial's u") {
    const Instance inst = worked_2x2();
    Assignment frac;
    frac.x = Mat(2, 2, 0.5);
    const RoundingOutcome out = gra_best_of(inst, frac, 1, 99);
    Rng rng(derive_seed(99, 0));
    const Assignment direct = gra_round(frac, sample_simplex(2, rng));
    REQUIRE(out.assignment == direct);
    REQUIRE(out.trial == 0);
}

TEST_CASE("best-of on integral input returns its own cost") {
    const Instance inst = worked_2x2();
    const Assignment a = assignment_from_hubs({0, 1}, 2);
    const RoundingOutcome out = gra_best_of(inst, a, 25, 1);
    REQUIRE(out.cost.total == Catch::Approx(eval_cost(inst, a).total));
}

TEST_CASE("best-of cost is at most the mean trial cost") {
    const Instance inst = generate_random(4, 2, HubCostSpec::uniform(0, 20), 8);
    Assignment frac;
    frac.x = Mat(4, 2);
    Rng rng(9);
    for (int i = 0; i < 4; ++i) {
        const SimplexPoint p = sample_simplex(2, rng);
        frac.x(i, 0) = p[0];
        frac.x(i, 1) = p[1];
    }
    const int trials = 200;
    const RoundingOutcome best = gra_best_of(inst, frac, trials, 10);
    double mean = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng trng(derive_seed(10, t));
        mean += eval_cost(inst, gra_round(frac, sample_simplex(2, trng))).total;
    }
    mean /= trials;
    REQUIRE(best.cost.total <= mean + 1e-9);
}

TEST_CASE("best-of search is deterministic under a fixed seed") {
    const Instance inst = generate_random(5, 3, HubCostSpec::uniform(4, 20), 11);
    Assignment frac;
    frac.x = Mat(5, 3, 1.0 / 3.0);
    const RoundingOutcome a = gra_best_of(inst, frac, 500, 123);
    const RoundingOutcome b = gra_best_of(inst, frac, 500, 123);
    REQUIRE(a.assignment == b.assignment);
    REQUIRE(a.trial == b.trial);
    REQUIRE(a.cost.total == b.cost.total);
}

TEST_CASE("simplex distance examples") {
    REQUIRE(simplex_distance(pt({0.2, 0.8}), pt({0.2, 0.8})) == 0.0);
    REQUIRE(simplex_distance(pt({1, 0}), pt({0, 1})) == 2.0);
    REQUIRE(simplex_distance(pt({0.2, 0.8}), pt({0.5, 0.5})) == Catch::Approx(0.6));
}

TEST_CASE("selection frequencies track the coordinates (marginal preservation)") {
    const SimplexPoint x = pt({0.2, 0.3, 0.5});
    const int N = 30000;
    Rng rng(12);
    std::vector<int> hits(3, 0);
    for (int t = 0; t < N; ++t) ++hits[classify_region(x, sample_simplex(3, rng))];
    for (int s = 0; s < 3; ++s) {
        const double freq = static_cast<double>(hits[s]) / N;
        const double sigma = std::sqrt(x[s] * (1 - x[s]) / N);
        REQUIRE(std::abs(freq - x[s]) <= 3 * sigma + 0.01);
    }
}

TEST_CASE("shared-u rounding contracts distances in expectation") {
    Rng rng(13);
    for (int rep = 0; rep < 5; ++rep) {
        const int k = 3;
        const SimplexPoint x = sample_simplex(k, rng);
        const SimplexPoint y = sample_simplex(k, rng);
        const int N = 20000;
        double sum = 0.0, sumsq = 0.0;
        Rng urng(derive_seed(14, rep));
        for (int t = 0; t < N; ++t) {
            const SimplexPoint u = sample_simplex(k, urng);
            const double d = classify_region(x, u) == classify_region(y, u) ? 0.0 : 2.0;
            sum += d;
            sumsq += d * d;
        }
        const double mean = sum / N;
        const double se = std::sqrt(std::max(sumsq / N - mean * mean, 0.0) / N);
        REQUIRE(mean <= 2.0 * simplex_distance(x, y) + 3.0 * se);
    }
}

TEST_CASE("trials must be positive") {
    const Instance inst = worked_2x2();
    Assignment frac;
    frac.x = Mat(2, 2, 0.5);
    REQUIRE_THROWS_AS(gra_best_of(inst, frac, 0, 1), std::invalid_argument);
}
