#pragma once

#include <cstdint>
#include <vector>

#include "nbf/sample.hpp"

namespace nbf {

// Mid-rank of each value within its own sequence, aligned to input order.
// Ties receive the mean of the rank positions they would occupy.
std::vector<double> mid_ranks(const std::vector<double>& values);

struct MinMaxRanks {
    std::vector<double> min;  // (# strictly smaller) + 1
    std::vector<double> max;  // (# smaller or equal)
};
MinMaxRanks min_max_ranks(const std::vector<double>& values);

// All rank quantities for a two-sample dataset: pooled mid/min/max ranks,
// within-group ranks, and placements (pooled mid-rank minus internal
// mid-rank). Each vector is aligned to the corresponding input sample.
struct RankSummary {
    std::vector<double> pooled_mid1, pooled_mid2;
    std::vector<double> pooled_min1, pooled_min2;
    std::vector<double> pooled_max1, pooled_max2;
    std::vector<double> internal_mid1, internal_mid2;
    std::vector<double> internal_min1, internal_min2;
    std::vector<double> internal_max1, internal_max2;
    std::vector<double> placement1, placement2;
};
RankSummary placements(const Sample& s1, const Sample& s2);

// Sufficient statistics for the effect and variance estimators, computable
// in one pass over the pooled sorted values. This is the permutation-loop
// hot path: the pooled order never changes, only the labels do.
struct TwoSampleAggregates {
    int n1 = 0, n2 = 0;
    double placement_sum1 = 0.0, placement_sum2 = 0.0;
    double placement_ss1 = 0.0, placement_ss2 = 0.0;  // centered sums of squares
    double tie_pair_count = 0.0;                      // cross-group tied pairs
    bool any_pooled_tie = false;
    bool all_tied = false;
};

// labels[i] in {1,2}, aligned to sorted_values (ascending). Group sizes are
// inferred from the labels.
TwoSampleAggregates aggregate_sorted(const std::vector<double>& sorted_values,
                                     const std::vector<std::uint8_t>& labels);

// Pooled values sorted ascending with their group labels; the observed
// labelling is kept so permutation replicates can reshuffle copies of it.
struct SortedPool {
    std::vector<double> values;
    std::vector<std::uint8_t> labels;
};
SortedPool pool_and_sort(const std::vector<double>& s1, const std::vector<double>& s2);

TwoSampleAggregates aggregate_samples(const std::vector<double>& s1,
                                      const std::vector<double>& s2);

}  // namespace nbf
