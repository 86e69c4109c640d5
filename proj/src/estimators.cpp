#include "nbf/estimators.hpp"

#include <algorithm>
#include <stdexcept>

namespace nbf {

namespace {

void require_sizes(const Sample& s1, const Sample& s2, std::size_t min_size, const char* what) {
    require_finite(s1.values, what);
    require_finite(s2.values, what);
    if (s1.values.size() < min_size || s2.values.size() < min_size) {
        throw std::invalid_argument(std::string(what) + ": each group needs at least " +
                                    std::to_string(min_size) + " observations");
    }
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

EffectEstimate estimate_from_aggregates(const TwoSampleAggregates& agg) {
    const int n1 = agg.n1;
    const int n2 = agg.n2;
    if (n1 < 2 || n2 < 2) {
        throw std::invalid_argument("estimate_effect: each group needs at least 2 observations");
    }
    const double N = static_cast<double>(n1 + n2);
    const double pairs = static_cast<double>(n1) * static_cast<double>(n2);

    EffectEstimate est;
    est.n1 = n1;
    est.n2 = n2;
    est.theta_hat = agg.placement_sum2 / pairs;
    est.tau_hat = agg.tie_pair_count / pairs;
    est.sigma1_sq = agg.placement_ss1 / (n1 - 1) / (static_cast<double>(n2) * n2);
    est.sigma2_sq = agg.placement_ss2 / (n2 - 1) / (static_cast<double>(n1) * n1);
    est.var_delong = N * (est.sigma1_sq / n1 + est.sigma2_sq / n2);

    const double dn = pairs * (n1 - 1) * (n2 - 1);
    const double bracket = agg.placement_ss1 + agg.placement_ss2 -
                           pairs * (est.theta_hat * (1.0 - est.theta_hat) - 0.25 * est.tau_hat);
    est.var_unbiased = std::max(0.0, bracket) / dn;

    est.has_ties = agg.any_pooled_tie;
    est.all_tied = agg.all_tied;
    // Placement sums are half-integers, so these comparisons are exact.
    est.separated = (agg.placement_sum2 == 0.0) || (agg.placement_sum2 == pairs);
    return est;
}

EffectEstimate estimate_effect(const std::vector<double>& s1, const std::vector<double>& s2) {
    require_finite(s1, "estimate_effect");
    require_finite(s2, "estimate_effect");
    return estimate_from_aggregates(aggregate_samples(s1, s2));
}

double mw_effect(const Sample& s1, const Sample& s2) {
    require_sizes(s1, s2, 1, "mw_effect");
    const RankSummary rs = placements(s1, s2);
    double sum2 = 0.0;
    for (double p : rs.placement2) sum2 += p;
    return sum2 / (static_cast<double>(s1.values.size()) * static_cast<double>(s2.values.size()));
}

double tie_probability(const Sample& s1, const Sample& s2) {
    require_sizes(s1, s2, 1, "tie_probability");
    const RankSummary rs = placements(s1, s2);
    // Mean spread of pooled ranks minus mean spread of internal ranks for
    // group 2: exactly the tied-pair fraction.
    const double pooled_spread = mean(rs.pooled_max2) - mean(rs.pooled_min2);
    const double internal_spread = mean(rs.internal_max2) - mean(rs.internal_min2);
    return (pooled_spread - internal_spread) / static_cast<double>(s1.values.size());
}

DelongVariance delong_variance(const Sample& s1, const Sample& s2) {
    require_sizes(s1, s2, 2, "delong_variance");
    const EffectEstimate est = estimate_effect(s1.values, s2.values);
    return {est.var_delong, est.sigma1_sq, est.sigma2_sq};
}

double unbiased_variance(const Sample& s1, const Sample& s2) {
    require_sizes(s1, s2, 2, "unbiased_variance");
    return estimate_effect(s1.values, s2.values).var_unbiased;
}

VarianceBounds bk_bounds(double theta, int m) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("bk_bounds: theta must lie in [0,1]");
    }
    if (m < 2) {
        throw std::invalid_argument("bk_bounds: m must be at least 2");
    }
    const double numerator = theta * (1.0 - theta);
    return {numerator / m, numerator / (m - 1)};
}

std::optional<double> variance_ratio(double theta, double var_unbiased, int m) {
    if (m < 1) {
        throw std::invalid_argument("variance_ratio: m must be at least 1");
    }
    if (!(var_unbiased > 0.0) || !(theta > 0.0 && theta < 1.0)) {
        return std::nullopt;
    }
    return theta * (1.0 - theta) / (m * var_unbiased);
}

}  // namespace nbf
