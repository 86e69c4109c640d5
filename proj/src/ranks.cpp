#include "nbf/ranks.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace nbf {

namespace {

std::vector<std::size_t> sorted_order(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order;
}

}  // namespace

std::vector<double> mid_ranks(const std::vector<double>& values) {
    require_finite(values, "mid_ranks");
    const std::size_t n = values.size();
    const auto order = sorted_order(values);
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + 1 + j);  // (min + max)/2
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
        i = j;
    }
    return ranks;
}

MinMaxRanks min_max_ranks(const std::vector<double>& values) {
    require_finite(values, "min_max_ranks");
    const std::size_t n = values.size();
    const auto order = sorted_order(values);
    MinMaxRanks out;
    out.min.resize(n);
    out.max.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) {
            out.min[order[k]] = static_cast<double>(i + 1);
            out.max[order[k]] = static_cast<double>(j);
        }
        i = j;
    }
    return out;
}

RankSummary placements(const Sample& s1, const Sample& s2) {
    require_finite(s1.values, "placements");
    require_finite(s2.values, "placements");
    const std::size_t n1 = s1.values.size();
    const std::size_t n2 = s2.values.size();

    std::vector<double> pooled(n1 + n2);
    std::copy(s1.values.begin(), s1.values.end(), pooled.begin());
    std::copy(s2.values.begin(), s2.values.end(), pooled.begin() + static_cast<std::ptrdiff_t>(n1));

    const auto pooled_mid = mid_ranks(pooled);
    const auto pooled_mm = min_max_ranks(pooled);

    RankSummary out;
    auto split = [&](const std::vector<double>& pooled_vec, std::vector<double>& g1,
                     std::vector<double>& g2) {
        g1.assign(pooled_vec.begin(), pooled_vec.begin() + static_cast<std::ptrdiff_t>(n1));
        g2.assign(pooled_vec.begin() + static_cast<std::ptrdiff_t>(n1), pooled_vec.end());
    };
    split(pooled_mid, out.pooled_mid1, out.pooled_mid2);
    split(pooled_mm.min, out.pooled_min1, out.pooled_min2);
    split(pooled_mm.max, out.pooled_max1, out.pooled_max2);

    out.internal_mid1 = mid_ranks(s1.values);
    out.internal_mid2 = mid_ranks(s2.values);
    const auto mm1 = min_max_ranks(s1.values);
    const auto mm2 = min_max_ranks(s2.values);
    out.internal_min1 = mm1.min;
    out.internal_max1 = mm1.max;
    out.internal_min2 = mm2.min;
    out.internal_max2 = mm2.max;

    out.placement1.resize(n1);
    out.placement2.resize(n2);
    for (std::size_t k = 0; k < n1; ++k) {
        out.placement1[k] = out.pooled_mid1[k] - out.internal_mid1[k];
    }
    for (std::size_t k = 0; k < n2; ++k) {
        out.placement2[k] = out.pooled_mid2[k] - out.internal_mid2[k];
    }
    return out;
}

TwoSampleAggregates aggregate_sorted(const std::vector<double>& sorted_values,
                                     const std::vector<std::uint8_t>& labels) {
    const std::size_t n = sorted_values.size();
    if (n == 0 || labels.size() != n) {
        throw std::invalid_argument("aggregate_sorted: empty input or label size mismatch");
    }

    TwoSampleAggregates agg;
    double sum1 = 0.0, sum2 = 0.0;
    double sumsq1 = 0.0, sumsq2 = 0.0;
    int n1 = 0, n2 = 0;
    std::size_t i = 0;
    std::size_t pos = 0;
    int c1_seen = 0, c2_seen = 0;
    while (i < n) {
        std::size_t j = i;
        int c1 = 0;
        while (j < n && sorted_values[j] == sorted_values[i]) {
            if (labels[j] == 1) ++c1;
            ++j;
        }
        const int t = static_cast<int>(j - i);
        const int c2 = t - c1;
        const double pooled_mid = static_cast<double>(pos) + 0.5 * (t + 1);
        if (c1 > 0) {
            const double internal_mid = static_cast<double>(c1_seen) + 0.5 * (c1 + 1);
            const double pl = pooled_mid - internal_mid;
            sum1 += c1 * pl;
            sumsq1 += c1 * pl * pl;
        }
        if (c2 > 0) {
            const double internal_mid = static_cast<double>(c2_seen) + 0.5 * (c2 + 1);
            const double pl = pooled_mid - internal_mid;
            sum2 += c2 * pl;
            sumsq2 += c2 * pl * pl;
        }
        agg.tie_pair_count += static_cast<double>(c1) * static_cast<double>(c2);
        if (t > 1) agg.any_pooled_tie = true;
        pos += static_cast<std::size_t>(t);
        c1_seen += c1;
        c2_seen += c2;
        n1 += c1;
        n2 += c2;
        i = j;
    }
    agg.n1 = n1;
    agg.n2 = n2;
    agg.placement_sum1 = sum1;
    agg.placement_sum2 = sum2;
    agg.placement_ss1 = (n1 > 0) ? std::max(0.0, sumsq1 - sum1 * sum1 / n1) : 0.0;
    agg.placement_ss2 = (n2 > 0) ? std::max(0.0, sumsq2 - sum2 * sum2 / n2) : 0.0;
    agg.all_tied = (sorted_values.front() == sorted_values.back());
    return agg;
}

SortedPool pool_and_sort(const std::vector<double>& s1, const std::vector<double>& s2) {
    require_finite(s1, "pool_and_sort");
    require_finite(s2, "pool_and_sort");
    const std::size_t n1 = s1.size();
    const std::size_t n = n1 + s2.size();
    std::vector<std::pair<double, std::uint8_t>> tagged(n);
    for (std::size_t i = 0; i < n1; ++i) tagged[i] = {s1[i], 1};
    for (std::size_t i = n1; i < n; ++i) tagged[i] = {s2[i - n1], 2};
    std::sort(tagged.begin(), tagged.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SortedPool pool;
    pool.values.resize(n);
    pool.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool.values[i] = tagged[i].first;
        pool.labels[i] = tagged[i].second;
    }
    return pool;
}

TwoSampleAggregates aggregate_samples(const std::vector<double>& s1,
                                      const std::vector<double>& s2) {
    const SortedPool pool = pool_and_sort(s1, s2);
    return aggregate_sorted(pool.values, pool.labels);
}

}  // namespace nbf
