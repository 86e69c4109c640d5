#pragma once

#include <optional>
#include <vector>

#include "nbf/ranks.hpp"
#include "nbf/sample.hpp"

namespace nbf {

// Point estimates and both variance estimators for one two-sample dataset.
// var_delong is on the sqrt(N)-statistic scale; var_unbiased is the variance
// of theta_hat itself (multiply by N to compare the two).
struct EffectEstimate {
    int n1 = 0;
    int n2 = 0;
    double theta_hat = 0.0;
    double tau_hat = 0.0;
    double sigma1_sq = 0.0;    // per-group placement variance / (N-n1)^2
    double sigma2_sq = 0.0;    // per-group placement variance / (N-n2)^2
    double var_delong = 0.0;   // N * (sigma1_sq/n1 + sigma2_sq/n2)
    double var_unbiased = 0.0;
    bool has_ties = false;     // any tie in the pooled data
    bool separated = false;    // theta_hat in {0,1}
    bool all_tied = false;     // every pooled value equal

    int m() const { return n1 < n2 ? n1 : n2; }
    int N() const { return n1 + n2; }
    bool degenerate() const { return separated || all_tied; }
};

EffectEstimate estimate_from_aggregates(const TwoSampleAggregates& agg);
EffectEstimate estimate_effect(const std::vector<double>& s1, const std::vector<double>& s2);

// theta_hat: P(X1 < X2) + 0.5 P(X1 = X2), estimated from mean placements.
double mw_effect(const Sample& s1, const Sample& s2);

// tau_hat: probability of a cross-group tie, from the max/min rank means.
double tie_probability(const Sample& s1, const Sample& s2);

struct DelongVariance {
    double var_delong = 0.0;  // sqrt(N) scale
    double sigma1_sq = 0.0;
    double sigma2_sq = 0.0;
};
DelongVariance delong_variance(const Sample& s1, const Sample& s2);

double unbiased_variance(const Sample& s1, const Sample& s2);

struct VarianceBounds {
    double sigma_max_sq = 0.0;     // theta(1-theta)/m
    double empirical_bound = 0.0;  // theta(1-theta)/(m-1)
};
VarianceBounds bk_bounds(double theta, int m);

// r_hat = theta(1-theta)/(m * var_unbiased); empty on the degenerate path
// (boundary theta or zero variance), where the sigma-max fallback applies.
std::optional<double> variance_ratio(double theta, double var_unbiased, int m);

}  // namespace nbf
