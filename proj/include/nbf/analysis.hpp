#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbf/estimators.hpp"
#include "nbf/inference.hpp"
#include "nbf/intervals.hpp"
#include "nbf/sample.hpp"

namespace nbf {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct AnalysisOptions {
    double alpha = 0.05;
    bool run_bm = true;
    bool run_perm = true;
    bool run_c2 = true;
    std::optional<double> theta0;
    long n_permutations = 2000;
    std::uint64_t seed = kDefaultSeed;
};

struct MethodReport {
    TestResult test;
    ConfidenceInterval ci;
};

struct DatasetAnalysis {
    std::string label1, label2;
    EffectEstimate estimate;
    std::vector<MethodReport> methods;
};

// Runs the selected tests on one dataset and pairs each with its compatible
// interval (built from the same adjusted effect/variance the test used, and
// switched to the bounded fallback interval whenever the test fell back).
DatasetAnalysis analyze_dataset(const Sample& s1, const Sample& s2,
                                const AnalysisOptions& options);

// The interval that is decision-compatible with a given test result.
ConfidenceInterval compatible_interval(const TestResult& test, const EffectEstimate& est);

std::string method_name(Method method);
std::string interval_kind_name(IntervalKind kind);
std::string fallback_name(Fallback fallback);

}  // namespace nbf
