#pragma once

#include <span>

namespace lpdgcn {

double mean(std::span<const double> xs);

/// Standard deviation with the (n - 1) denominator; 0 for fewer than two values.
double sample_std(std::span<const double> xs);

struct RankSumResult {
  double statistic = 0.0;  // rank sum of the first sample (mid-ranks for ties)
  double p_value = 1.0;    // two-sided
  bool exact = false;
};

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test. With both samples of size
/// at most 10 the p-value is exact: the permutation distribution of the rank
/// sum is counted over all C(n1+n2, n1) splits of the pooled mid-ranks.
/// Otherwise a normal approximation with tie correction and a 0.5 continuity
/// correction is used.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b);

}  // namespace lpdgcn
