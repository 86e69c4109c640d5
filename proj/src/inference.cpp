#include "nbf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nbf/distributions.hpp"

namespace nbf {

namespace {

void require_alpha(double alpha, const char* what) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument(std::string(what) + ": alpha must lie in (0,1)");
    }
}

// Studentized effect statistic for one (possibly permuted) labelling.
// Assumes the pool is not all-tied; separated labellings go through the
// one-step-back substitution.
double replicate_statistic(const TwoSampleAggregates& agg) {
    const int n1 = agg.n1;
    const int n2 = agg.n2;
    const double N = static_cast<double>(n1 + n2);
    const double pairs = static_cast<double>(n1) * static_cast<double>(n2);
    double theta = agg.placement_sum2 / pairs;
    double v2;
    if (agg.placement_sum2 == 0.0 || agg.placement_sum2 == pairs) {
        const auto adj = one_step_back(theta, n1, n2, agg.any_pooled_tie);
        theta = adj.first;
        v2 = adj.second;
    } else {
        const double s1sq = agg.placement_ss1 / (n1 - 1) / (static_cast<double>(n2) * n2);
        const double s2sq = agg.placement_ss2 / (n2 - 1) / (static_cast<double>(n1) * n1);
        v2 = N * (s1sq / n1 + s2sq / n2);
    }
    return std::sqrt(N) * (theta - 0.5) / std::sqrt(v2);
}

// Type-7 empirical quantile (linear interpolation), data already sorted.
double type7_quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

TestResult all_tied_result(Method method, double alpha) {
    TestResult r;
    r.method = method;
    r.alpha = alpha;
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.reject = false;
    r.fallback = Fallback::AllTied;
    r.theta_used = 0.5;
    r.var_delong_used = 0.0;
    return r;
}

TestResult c2_core(const EffectEstimate& est, double theta0, double alpha, Method method_normal) {
    require_alpha(alpha, "c2_test");
    if (!(theta0 > 0.0 && theta0 < 1.0)) {
        throw std::invalid_argument("c2_test: theta0 must lie strictly inside (0,1)");
    }
    TestResult r;
    r.alpha = alpha;
    r.theta_used = est.theta_hat;
    r.var_delong_used = est.var_delong;
    const double diff = est.theta_hat - theta0;
    const double denom0 = theta0 * (1.0 - theta0);
    if (est.separated || !(est.var_unbiased > 0.0)) {
        // Variance at its theoretical maximum; flag so intervals switch too.
        r.method = (method_normal == Method::C2) ? Method::C2SigmaMax : method_normal;
        r.fallback = est.all_tied ? Fallback::AllTied : Fallback::SigmaMax;
        r.statistic = static_cast<double>(est.m()) * diff * diff / denom0;
    } else {
        r.method = method_normal;
        r.statistic =
            est.theta_hat * (1.0 - est.theta_hat) * diff * diff / (denom0 * est.var_unbiased);
    }
    r.p_value = 1.0 - chi2_1_cdf(r.statistic);
    r.reject = r.statistic > chi2_1_quantile(1.0 - alpha);
    return r;
}

// Level-free pieces of the observed permutation statistic: the studentized
// statistic, the effect/variance it used, and any fallback substitution.
void fill_observed_statistic(TestResult& r, const EffectEstimate& est) {
    double theta = est.theta_hat;
    double v2 = est.var_delong;
    if (est.separated) {
        const auto adj = one_step_back(theta, est.n1, est.n2, est.has_ties);
        theta = adj.first;
        v2 = adj.second;
        r.fallback = Fallback::OneStepBack;
    }
    r.statistic = std::sqrt(static_cast<double>(est.N())) * (theta - 0.5) / std::sqrt(v2);
    r.theta_used = theta;
    r.var_delong_used = v2;
}

void finish_distribution(PermutationDistribution& dist, std::vector<double>&& stats, long below,
                         long above) {
    const auto n_p = static_cast<double>(stats.size());
    dist.base.p_value = std::clamp(
        2.0 * std::min(static_cast<double>(below), static_cast<double>(above)) / n_p, 0.0, 1.0);
    std::sort(stats.begin(), stats.end());
    dist.sorted_stats = std::move(stats);
}

}  // namespace

std::optional<double> satterthwaite_df(double sigma1_sq, double sigma2_sq, int n1, int n2) {
    if (n1 < 2 || n2 < 2) {
        throw std::invalid_argument("satterthwaite_df: group sizes must be at least 2");
    }
    if (sigma1_sq < 0.0 || sigma2_sq < 0.0) {
        throw std::invalid_argument("satterthwaite_df: variance components must be nonnegative");
    }
    if (sigma1_sq == 0.0 && sigma2_sq == 0.0) {
        return std::nullopt;
    }
    const double a1 = sigma1_sq / n1;
    const double a2 = sigma2_sq / n2;
    return (a1 + a2) * (a1 + a2) / (a1 * a1 / (n1 - 1) + a2 * a2 / (n2 - 1));
}

std::pair<double, double> one_step_back(double theta_hat, int n1, int n2, bool ties_present) {
    if (theta_hat != 0.0 && theta_hat != 1.0) {
        throw std::invalid_argument("one_step_back: theta_hat must be exactly 0 or 1");
    }
    const double pairs = static_cast<double>(n1) * static_cast<double>(n2);
    const double N = static_cast<double>(n1 + n2);
    const double eps = ties_present ? 0.5 / pairs : 1.0 / pairs;
    const double var_adj = ties_present ? 0.5 * N / (pairs * pairs) : 2.0 * N / (pairs * pairs);
    const double theta_adj = (theta_hat == 1.0) ? 1.0 - eps : eps;
    return {theta_adj, var_adj};
}

double one_step_back_df(int n1, int n2) {
    return 4.0 / (1.0 / (n1 - 1) + 1.0 / (n2 - 1));
}

TestResult brunner_munzel_from(const EffectEstimate& est, double alpha) {
    require_alpha(alpha, "brunner_munzel_test");
    if (est.all_tied) {
        return all_tied_result(Method::BM, alpha);
    }
    TestResult r;
    r.method = Method::BM;
    r.alpha = alpha;
    double theta = est.theta_hat;
    double v2 = est.var_delong;
    double df;
    if (est.separated) {
        const auto adj = one_step_back(theta, est.n1, est.n2, est.has_ties);
        theta = adj.first;
        v2 = adj.second;
        df = one_step_back_df(est.n1, est.n2);
        r.fallback = Fallback::OneStepBack;
    } else {
        df = satterthwaite_df(est.sigma1_sq, est.sigma2_sq, est.n1, est.n2).value();
    }
    const double T = std::sqrt(static_cast<double>(est.N())) * (theta - 0.5) / std::sqrt(v2);
    r.statistic = T;
    r.df = df;
    r.p_value = std::clamp(2.0 * (1.0 - t_cdf(std::fabs(T), df)), 0.0, 1.0);
    r.reject = std::fabs(T) > t_quantile(1.0 - 0.5 * alpha, df);
    r.theta_used = theta;
    r.var_delong_used = v2;
    return r;
}

TestResult c2_from(const EffectEstimate& est, double alpha) {
    return c2_core(est, 0.5, alpha, Method::C2);
}

TestResult c2_theta0_from(const EffectEstimate& est, double theta0, double alpha) {
    return c2_core(est, theta0, alpha, Method::C2Theta0);
}

TestResult brunner_munzel_test(const Sample& s1, const Sample& s2, double alpha) {
    return brunner_munzel_from(estimate_effect(s1.values, s2.values), alpha);
}

TestResult c2_test(const Sample& s1, const Sample& s2, double alpha) {
    return c2_from(estimate_effect(s1.values, s2.values), alpha);
}

TestResult c2_test_theta0(const Sample& s1, const Sample& s2, double theta0, double alpha) {
    return c2_theta0_from(estimate_effect(s1.values, s2.values), theta0, alpha);
}

TestResult PermutationDistribution::at(double alpha) const {
    require_alpha(alpha, "permutation_test");
    TestResult r = base;
    r.alpha = alpha;
    if (all_tied) {
        r.perm_quantiles = {0.0, 0.0};
        r.reject = false;
        return r;
    }
    r.perm_quantiles = {type7_quantile(sorted_stats, 0.5 * alpha),
                        type7_quantile(sorted_stats, 1.0 - 0.5 * alpha)};
    r.reject = r.p_value < alpha;
    return r;
}

PermutationDistribution permutation_distribution(const SortedPool& pool, long n_p,
                                                 std::uint64_t seed) {
    if (n_p < 1) {
        throw std::invalid_argument("permutation_test: n_p must be at least 1");
    }
    const EffectEstimate est = estimate_from_aggregates(aggregate_sorted(pool.values, pool.labels));

    PermutationDistribution dist;
    dist.base.method = Method::Perm;
    dist.base.n_permutations = n_p;
    dist.base.seed = seed;
    if (est.all_tied) {
        dist.all_tied = true;
        dist.base.fallback = Fallback::AllTied;
        dist.base.p_value = 1.0;
        return dist;
    }
    fill_observed_statistic(dist.base, est);

    std::vector<double> stats(static_cast<std::size_t>(n_p));
    std::vector<std::uint8_t> work;
    long below = 0, above = 0;
    for (long h = 0; h < n_p; ++h) {
        work = pool.labels;
        RngStream g(seed, static_cast<std::uint64_t>(h) + 1);
        g.shuffle(work);
        const double t = replicate_statistic(aggregate_sorted(pool.values, work));
        stats[static_cast<std::size_t>(h)] = t;
        if (t < dist.base.statistic) {
            ++below;
        } else if (t > dist.base.statistic) {
            ++above;
        }
    }
    finish_distribution(dist, std::move(stats), below, above);
    return dist;
}

TestResult permutation_test_pool(const SortedPool& pool, double alpha, long n_p,
                                 std::uint64_t seed) {
    require_alpha(alpha, "permutation_test");
    return permutation_distribution(pool, n_p, seed).at(alpha);
}

TestResult permutation_test(const Sample& s1, const Sample& s2, double alpha, long n_p,
                            std::uint64_t seed) {
    require_finite(s1.values, "permutation_test");
    require_finite(s2.values, "permutation_test");
    return permutation_test_pool(pool_and_sort(s1.values, s2.values), alpha, n_p, seed);
}

TestResult exhaustive_permutation_test(const Sample& s1, const Sample& s2, double alpha) {
    require_alpha(alpha, "exhaustive_permutation_test");
    const SortedPool pool = pool_and_sort(s1.values, s2.values);
    const int n1 = static_cast<int>(s1.values.size());
    const int N = static_cast<int>(pool.values.size());

    // C(N, n1) with an early bail-out above the supported size.
    constexpr double kMaxAssignments = 200000.0;
    double count = 1.0;
    for (int i = 1; i <= n1; ++i) {
        count *= static_cast<double>(N - n1 + i) / static_cast<double>(i);
        if (count > 10.0 * kMaxAssignments) break;
    }
    if (count > kMaxAssignments) {
        throw std::invalid_argument(
            "exhaustive_permutation_test: more than 200,000 group assignments");
    }

    const EffectEstimate est = estimate_from_aggregates(aggregate_sorted(pool.values, pool.labels));
    PermutationDistribution dist;
    dist.base.method = Method::Perm;
    if (est.all_tied) {
        dist.all_tied = true;
        dist.base.fallback = Fallback::AllTied;
        dist.base.p_value = 1.0;
        return dist.at(alpha);
    }
    fill_observed_statistic(dist.base, est);

    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(count) + 1);
    std::vector<int> comb(static_cast<std::size_t>(n1));
    for (int i = 0; i < n1; ++i) comb[static_cast<std::size_t>(i)] = i;
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(N));
    long below = 0, above = 0;
    for (;;) {
        std::fill(labels.begin(), labels.end(), std::uint8_t{2});
        for (int idx : comb) labels[static_cast<std::size_t>(idx)] = 1;
        const double t = replicate_statistic(aggregate_sorted(pool.values, labels));
        stats.push_back(t);
        if (t < dist.base.statistic) {
            ++below;
        } else if (t > dist.base.statistic) {
            ++above;
        }
        int i = n1 - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == N - n1 + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n1; ++j) {
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    dist.base.n_permutations = static_cast<long>(stats.size());
    finish_distribution(dist, std::move(stats), below, above);
    return dist.at(alpha);
}

}  // namespace nbf
