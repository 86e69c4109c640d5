#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nbf/estimators.hpp"
#include "nbf/sample.hpp"

namespace nbf {

enum class Method { BM, Perm, C2, C2Theta0, C2SigmaMax };

enum class Fallback { None, OneStepBack, SigmaMax, AllTied };

struct TestResult {
    Method method = Method::BM;
    double statistic = 0.0;
    std::optional<double> df;  // BM only
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    Fallback fallback = Fallback::None;

    // Permutation bookkeeping (Perm only).
    long n_permutations = 0;
    std::optional<std::pair<double, double>> perm_quantiles;  // (q_{a/2}, q_{1-a/2})
    std::uint64_t seed = 0;

    // Effect and variance actually used for the statistic; after a
    // one-step-back substitution these differ from the raw estimate, and the
    // compatible interval must be built from the same values.
    double theta_used = 0.5;
    double var_delong_used = 0.0;
};

// Effective degrees of freedom for the t reference of the studentized
// effect statistic. Weights each normalized variance component by its own
// group size (the pairing that reproduces published worked examples); empty
// when both components vanish.
std::optional<double> satterthwaite_df(double sigma1_sq, double sigma2_sq, int n1, int n2);

// Substitution for fully separated samples: the nearest attainable effect
// value and the smallest non-zero variance estimate. Returns (theta_adj,
// var_delong_adj).
std::pair<double, double> one_step_back(double theta_hat, int n1, int n2, bool ties_present);

// Degrees of freedom paired with one_step_back: the separated configuration
// carries equal minimal per-group variance components, which collapse the
// Satterthwaite formula to this closed form.
double one_step_back_df(int n1, int n2);

TestResult brunner_munzel_test(const Sample& s1, const Sample& s2, double alpha);
TestResult c2_test(const Sample& s1, const Sample& s2, double alpha);
TestResult c2_test_theta0(const Sample& s1, const Sample& s2, double theta0, double alpha);
TestResult permutation_test(const Sample& s1, const Sample& s2, double alpha, long n_p,
                            std::uint64_t seed);

// Exact permutation distribution over all C(N, n1) group assignments;
// available when that count is at most 200,000.
TestResult exhaustive_permutation_test(const Sample& s1, const Sample& s2, double alpha);

// From-estimate variants used by the simulation hot path (the estimate is
// already available there; recomputing ranks would double the work).
TestResult brunner_munzel_from(const EffectEstimate& est, double alpha);
TestResult c2_from(const EffectEstimate& est, double alpha);
TestResult c2_theta0_from(const EffectEstimate& est, double theta0, double alpha);

// Permutation test over an already-sorted pool (the sort is label-invariant,
// so replicates only reshuffle labels and rescan).
TestResult permutation_test_pool(const SortedPool& pool, double alpha, long n_p,
                                 std::uint64_t seed);

// The permutation replicate distribution itself. The p-value and tail counts
// do not depend on the nominal level, so one run can serve several levels;
// `at` fills in the level-dependent pieces (decision and CI quantiles).
struct PermutationDistribution {
    TestResult base;                   // level-free fields filled in
    std::vector<double> sorted_stats;  // empty when the pool is all tied
    bool all_tied = false;

    TestResult at(double alpha) const;
};

PermutationDistribution permutation_distribution(const SortedPool& pool, long n_p,
                                                 std::uint64_t seed);

}  // namespace nbf
