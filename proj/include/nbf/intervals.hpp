#pragma once

#include <optional>
#include <utility>

namespace nbf {

enum class IntervalKind { BM, Perm, Ratio, BK };

struct ConfidenceInterval {
    IntervalKind kind = IntervalKind::BM;
    double lower = 0.0;
    double upper = 1.0;
    double level = 0.95;
    bool range_preserving = false;
    std::optional<double> q_hat;  // ratio interval only
};

// t-based interval around theta_hat; deliberately NOT clamped to [0,1]
// (bounds outside the parameter range are a documented behaviour under test).
ConfidenceInterval bm_interval(double theta_hat, double var_delong, double df, int N,
                               double alpha);

// Interval from the empirical permutation quantiles (q_{a/2}, q_{1-a/2});
// also not range-preserving.
ConfidenceInterval perm_interval(double theta_hat, double var_delong, int N,
                                 std::pair<double, double> perm_quantiles, double alpha);

// Range-preserving interval from inverting the variance-ratio chi-square
// test: the two roots of (1+qc)x^2 - (2t+qc)x + t^2 = 0 with q = var/(t(1-t))
// and c the chi-square(1) critical value.
ConfidenceInterval ratio_interval(double theta_hat, double var_unbiased, double alpha);

// Range-preserving interval from the theoretical variance bound
// theta(1-theta)/m; used whenever the sigma-max test fallback was used.
ConfidenceInterval bk_interval(double theta_hat, int m, double alpha);

}  // namespace nbf
