#include "nbf/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nbf/distributions.hpp"

namespace nbf {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("interval: alpha must lie in (0,1)");
    }
}

// Roots of (1+s)x^2 - (2t+s)x + t^2 = 0 for s >= 0, written to avoid the
// cancellation in the small root when t is near 0. Both roots are provably
// inside [0,1]; the clamp only absorbs last-bit rounding.
std::pair<double, double> effect_quadratic_roots(double theta, double s) {
    const double disc = s * s + 4.0 * s * theta * (1.0 - theta);
    const double big = 2.0 * theta + s + std::sqrt(disc);
    const double upper = big / (2.0 * (1.0 + s));
    const double lower = (big > 0.0) ? 2.0 * theta * theta / big : 0.0;
    return {std::clamp(lower, 0.0, 1.0), std::clamp(upper, 0.0, 1.0)};
}

}  // namespace

ConfidenceInterval bm_interval(double theta_hat, double var_delong, double df, int N,
                               double alpha) {
    require_alpha(alpha);
    if (!(df > 0.0)) {
        throw std::invalid_argument("bm_interval: df must be positive");
    }
    if (var_delong < 0.0) {
        throw std::invalid_argument("bm_interval: variance must be nonnegative");
    }
    const double half =
        t_quantile(1.0 - 0.5 * alpha, df) * std::sqrt(var_delong / static_cast<double>(N));
    return {IntervalKind::BM, theta_hat - half, theta_hat + half, 1.0 - alpha, false,
            std::nullopt};
}

ConfidenceInterval perm_interval(double theta_hat, double var_delong, int N,
                                 std::pair<double, double> perm_quantiles, double alpha) {
    require_alpha(alpha);
    if (var_delong < 0.0) {
        throw std::invalid_argument("perm_interval: variance must be nonnegative");
    }
    const double scale = std::sqrt(var_delong / static_cast<double>(N));
    return {IntervalKind::Perm, theta_hat - perm_quantiles.second * scale,
            theta_hat - perm_quantiles.first * scale, 1.0 - alpha, false, std::nullopt};
}

ConfidenceInterval ratio_interval(double theta_hat, double var_unbiased, double alpha) {
    require_alpha(alpha);
    if (!(theta_hat > 0.0 && theta_hat < 1.0) || !(var_unbiased > 0.0)) {
        throw std::invalid_argument(
            "ratio_interval: needs interior theta_hat and positive variance "
            "(use bk_interval on the degenerate path)");
    }
    const double c = chi2_1_quantile(1.0 - alpha);
    const double q_hat = var_unbiased / (theta_hat * (1.0 - theta_hat));
    const auto [lower, upper] = effect_quadratic_roots(theta_hat, q_hat * c);
    return {IntervalKind::Ratio, lower, upper, 1.0 - alpha, true, q_hat};
}

ConfidenceInterval bk_interval(double theta_hat, int m, double alpha) {
    require_alpha(alpha);
    if (m < 1) {
        throw std::invalid_argument("bk_interval: m must be at least 1");
    }
    if (!(theta_hat >= 0.0 && theta_hat <= 1.0)) {
        throw std::invalid_argument("bk_interval: theta_hat must lie in [0,1]");
    }
    const double c = chi2_1_quantile(1.0 - alpha);
    const auto [lower, upper] = effect_quadratic_roots(theta_hat, c / static_cast<double>(m));
    return {IntervalKind::BK, lower, upper, 1.0 - alpha, true, std::nullopt};
}

}  // namespace nbf
