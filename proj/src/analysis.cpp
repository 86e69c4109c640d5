#include "nbf/analysis.hpp"

#include <stdexcept>

namespace nbf {

namespace {

ConfidenceInterval point_interval(IntervalKind kind, double theta, double level) {
    return {kind, theta, theta, level, false, std::nullopt};
}

}  // namespace

ConfidenceInterval compatible_interval(const TestResult& test, const EffectEstimate& est) {
    const double alpha = test.alpha;
    switch (test.method) {
        case Method::BM:
            if (test.fallback == Fallback::AllTied) {
                return point_interval(IntervalKind::BM, est.theta_hat, 1.0 - alpha);
            }
            return bm_interval(test.theta_used, test.var_delong_used, test.df.value(), est.N(),
                               alpha);
        case Method::Perm:
            if (test.fallback == Fallback::AllTied) {
                return point_interval(IntervalKind::Perm, est.theta_hat, 1.0 - alpha);
            }
            return perm_interval(test.theta_used, test.var_delong_used, est.N(),
                                 test.perm_quantiles.value(), alpha);
        case Method::C2:
        case Method::C2Theta0:
        case Method::C2SigmaMax:
            if (test.fallback != Fallback::None) {
                return bk_interval(est.theta_hat, est.m(), alpha);
            }
            return ratio_interval(est.theta_hat, est.var_unbiased, alpha);
    }
    throw std::logic_error("compatible_interval: unknown method");
}

DatasetAnalysis analyze_dataset(const Sample& s1, const Sample& s2,
                                const AnalysisOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        throw std::invalid_argument("analyze_dataset: alpha must lie in (0,1)");
    }
    const SortedPool pool = pool_and_sort(s1.values, s2.values);
    const EffectEstimate est = estimate_from_aggregates(aggregate_sorted(pool.values, pool.labels));

    DatasetAnalysis out;
    out.label1 = s1.label;
    out.label2 = s2.label;
    out.estimate = est;

    if (options.run_bm) {
        const TestResult t = brunner_munzel_from(est, options.alpha);
        out.methods.push_back({t, compatible_interval(t, est)});
    }
    if (options.run_perm) {
        const TestResult t =
            permutation_test_pool(pool, options.alpha, options.n_permutations, options.seed);
        out.methods.push_back({t, compatible_interval(t, est)});
    }
    if (options.run_c2) {
        const TestResult t = c2_from(est, options.alpha);
        out.methods.push_back({t, compatible_interval(t, est)});
        if (options.theta0) {
            const TestResult t0 = c2_theta0_from(est, *options.theta0, options.alpha);
            out.methods.push_back({t0, compatible_interval(t0, est)});
        }
    }
    return out;
}

std::string method_name(Method method) {
    switch (method) {
        case Method::BM: return "bm";
        case Method::Perm: return "perm";
        case Method::C2: return "c2";
        case Method::C2Theta0: return "c2_theta0";
        case Method::C2SigmaMax: return "c2_sigma_max";
    }
    return "unknown";
}

std::string interval_kind_name(IntervalKind kind) {
    switch (kind) {
        case IntervalKind::BM: return "bm";
        case IntervalKind::Perm: return "perm";
        case IntervalKind::Ratio: return "ratio";
        case IntervalKind::BK: return "bk";
    }
    return "unknown";
}

std::string fallback_name(Fallback fallback) {
    switch (fallback) {
        case Fallback::None: return "none";
        case Fallback::OneStepBack: return "one_step_back";
        case Fallback::SigmaMax: return "sigma_max";
        case Fallback::AllTied: return "all_tied";
    }
    return "unknown";
}

}  // namespace nbf
