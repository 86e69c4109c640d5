#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nbf/ranks.hpp"
#include "nbf/rng.hpp"
#include "nbf/sample.hpp"

using doctest::Approx;
using namespace nbf;

TEST_CASE("mid_ranks: worked examples") {
    CHECK(mid_ranks({5.0}) == std::vector<double>{1.0});
    CHECK(mid_ranks({1.0, 2.0, 2.0, 3.0}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
    CHECK(mid_ranks({3.0, 1.0, 2.0}) == std::vector<double>{3.0, 1.0, 2.0});
    CHECK(mid_ranks({7.0, 7.0, 7.0}) == std::vector<double>{2.0, 2.0, 2.0});
}

TEST_CASE("min_max_ranks: worked examples") {
    const auto r = min_max_ranks({1.0, 2.0, 2.0, 3.0});
    CHECK(r.min == std::vector<double>{1.0, 2.0, 2.0, 4.0});
    CHECK(r.max == std::vector<double>{1.0, 3.0, 3.0, 4.0});
    const auto t = min_max_ranks({7.0, 7.0, 7.0});
    CHECK(t.min == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(t.max == std::vector<double>{3.0, 3.0, 3.0});
}

TEST_CASE("placements: worked example with a cross-group tie") {
    const Sample s1{{1.0, 2.0}, "a"};
    const Sample s2{{2.0, 3.0}, "b"};
    const auto r = placements(s1, s2);
    CHECK(r.pooled_mid1 == std::vector<double>{1.0, 2.5});
    CHECK(r.pooled_mid2 == std::vector<double>{2.5, 4.0});
    CHECK(r.internal_mid1 == std::vector<double>{1.0, 2.0});
    CHECK(r.internal_mid2 == std::vector<double>{1.0, 2.0});
    CHECK(r.placement1 == std::vector<double>{0.0, 0.5});
    CHECK(r.placement2 == std::vector<double>{1.5, 2.0});
}

TEST_CASE("placements: two identical singletons each get placement one half") {
    const Sample s1{{4.0}, "a"};
    const Sample s2{{4.0}, "b"};
    const auto r = placements(s1, s2);
    CHECK(r.placement1 == std::vector<double>{0.5});
    CHECK(r.placement2 == std::vector<double>{0.5});
}

TEST_CASE("pool_and_sort: sorted values with the original label multiset") {
    const auto pool = pool_and_sort({3.0, 1.0, 1.0}, {2.0, 1.0});
    CHECK(pool.values == std::vector<double>{1.0, 1.0, 1.0, 2.0, 3.0});
    REQUIRE(pool.labels.size() == 5);
    CHECK(std::count(pool.labels.begin(), pool.labels.end(), 1) == 3);
    CHECK(std::count(pool.labels.begin(), pool.labels.end(), 2) == 2);
    // The label attached to each value respects group membership: the value 2
    // came from group 2 and the value 3 from group 1.
    CHECK(pool.labels[3] == 2);
    CHECK(pool.labels[4] == 1);
}

TEST_CASE("aggregate_sorted: worked example fields") {
    const auto pool = pool_and_sort({1.0, 2.0}, {2.0, 3.0});
    const auto agg = aggregate_sorted(pool.values, pool.labels);
    CHECK(agg.n1 == 2);
    CHECK(agg.n2 == 2);
    CHECK(agg.placement_sum1 == 0.5);
    CHECK(agg.placement_sum2 == 3.5);
    CHECK(agg.tie_pair_count == 1.0);
    CHECK(agg.any_pooled_tie);
    CHECK_FALSE(agg.all_tied);
    // Centered sums of squares of {0, 0.5} and {1.5, 2}.
    CHECK(agg.placement_ss1 == Approx(0.125).epsilon(1e-14));
    CHECK(agg.placement_ss2 == Approx(0.125).epsilon(1e-14));
}

TEST_CASE("aggregate_sorted: all-tied pool is flagged") {
    const auto pool = pool_and_sort({5.0, 5.0}, {5.0, 5.0, 5.0});
    const auto agg = aggregate_sorted(pool.values, pool.labels);
    CHECK(agg.all_tied);
    CHECK(agg.tie_pair_count == 6.0);
    CHECK(agg.placement_sum2 == Approx(0.5 * 2 * 3).epsilon(1e-14));
}

TEST_CASE("rank engine: input validation") {
    CHECK_THROWS_AS(mid_ranks({}), std::invalid_argument);
    CHECK_THROWS_AS(min_max_ranks({}), std::invalid_argument);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(mid_ranks({1.0, nan}), std::invalid_argument);
    CHECK_THROWS_AS(placements(Sample{{1.0}, "a"}, Sample{{nan}, "b"}),
                    std::invalid_argument);
    CHECK_THROWS_AS(pool_and_sort({}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_sorted({1.0, 2.0}, {1}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Property tests on a half-integer grid (all rank arithmetic is exact there).
// ---------------------------------------------------------------------------

namespace {

std::vector<double> random_half_integers(RngStream& g, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = 0.5 * static_cast<double>(g.next_below(21));
    return v;
}

double pairwise_effect_sum(const std::vector<double>& s1, const std::vector<double>& s2) {
    double sum = 0.0;
    for (double x : s1) {
        for (double y : s2) {
            if (x < y) sum += 1.0;
            else if (x == y) sum += 0.5;
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("rank engine: structural invariants hold on fuzzed tied data") {
    RngStream g(424242);
    for (int rep = 0; rep < 2000; ++rep) {
        const int n1 = 2 + static_cast<int>(g.next_below(11));
        const int n2 = 2 + static_cast<int>(g.next_below(11));
        const Sample s1{random_half_integers(g, n1), "a"};
        const Sample s2{random_half_integers(g, n2), "b"};
        const int N = n1 + n2;

        // Mid-rank is the midpoint of the min and max ranks.
        const auto pooled = [&] {
            std::vector<double> all = s1.values;
            all.insert(all.end(), s2.values.begin(), s2.values.end());
            return all;
        }();
        const auto mids = mid_ranks(pooled);
        const auto mm = min_max_ranks(pooled);
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            REQUIRE(mids[i] == 0.5 * (mm.min[i] + mm.max[i]));
            rank_sum += mids[i];
        }
        REQUIRE(rank_sum == 0.5 * N * (N + 1));

        // Placements are bounded by the other group's size, and the two
        // placement sums split the pair count.
        const auto r = placements(s1, s2);
        double sum1 = 0.0, sum2 = 0.0;
        for (double p : r.placement1) {
            REQUIRE(p >= 0.0);
            REQUIRE(p <= static_cast<double>(n2));
            sum1 += p;
        }
        for (double p : r.placement2) {
            REQUIRE(p >= 0.0);
            REQUIRE(p <= static_cast<double>(n1));
            sum2 += p;
        }
        REQUIRE(sum1 + sum2 == static_cast<double>(n1) * n2);

        // The group-2 placement sum counts pairwise wins plus half-ties.
        REQUIRE(sum2 == pairwise_effect_sum(s1.values, s2.values));

        // One-pass aggregates agree with the per-observation summary.
        const auto agg = aggregate_samples(s1.values, s2.values);
        REQUIRE(agg.n1 == n1);
        REQUIRE(agg.n2 == n2);
        REQUIRE(agg.placement_sum1 == sum1);
        REQUIRE(agg.placement_sum2 == sum2);
        const auto center_ss = [](const std::vector<double>& v, double sum) {
            const double mean = sum / static_cast<double>(v.size());
            double ss = 0.0;
            for (double p : v) ss += (p - mean) * (p - mean);
            return ss;
        };
        REQUIRE(agg.placement_ss1 ==
                Approx(center_ss(r.placement1, sum1)).epsilon(1e-10).scale(1.0));
        REQUIRE(agg.placement_ss2 ==
                Approx(center_ss(r.placement2, sum2)).epsilon(1e-10).scale(1.0));

        // Cross-group tie pairs, counted directly.
        double tie_pairs = 0.0;
        for (double x : s1.values)
            for (double y : s2.values) tie_pairs += (x == y) ? 1.0 : 0.0;
        REQUIRE(agg.tie_pair_count == tie_pairs);
    }
}

TEST_CASE("rank engine: ranks are invariant under strictly increasing transforms") {
    RngStream g(9001);
    const auto affine = [](double x) { return 2.0 * x + 1.0; };
    const auto cubic = [](double x) { return x * x * x + 5.0 * x; };
    for (int rep = 0; rep < 300; ++rep) {
        const int n1 = 2 + static_cast<int>(g.next_below(9));
        const int n2 = 2 + static_cast<int>(g.next_below(9));
        const Sample s1{random_half_integers(g, n1), "a"};
        const Sample s2{random_half_integers(g, n2), "b"};
        for (auto* f : {+affine, +cubic}) {
            Sample t1 = s1, t2 = s2;
            for (double& x : t1.values) x = f(x);
            for (double& x : t2.values) x = f(x);
            const auto r = placements(s1, s2);
            const auto rt = placements(t1, t2);
            REQUIRE(r.placement1 == rt.placement1);
            REQUIRE(r.placement2 == rt.placement2);
            REQUIRE(r.pooled_mid1 == rt.pooled_mid1);
            REQUIRE(r.pooled_mid2 == rt.pooled_mid2);
        }
    }
}
