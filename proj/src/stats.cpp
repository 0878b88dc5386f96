#include "lpdgcn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lpdgcn {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

constexpr std::size_t kExactLimit = 10;

struct Ranked {
  std::vector<std::int64_t> doubled_ranks;  // 2 * mid-rank, always an integer
  double tie_term = 0.0;                    // sum over tie groups of t^3 - t
};

Ranked rank_pooled(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  Ranked r;
  r.doubled_ranks.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // positions i..j (0-based) share mid-rank ((i+1) + (j+1)) / 2
    const auto doubled = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r.doubled_ranks[order[k]] = doubled;
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

}  // namespace

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank_sum_test: empty sample");
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranked = rank_pooled(pooled);

  std::int64_t w2 = 0;
  for (std::size_t i = 0; i < n1; ++i) w2 += ranked.doubled_ranks[i];

  RankSumResult result;
  result.statistic = static_cast<double>(w2) / 2.0;

  if (n1 <= kExactLimit && n2 <= kExactLimit) {
    // ways[j][s]: number of j-subsets of the pooled items with doubled rank sum s.
    const std::int64_t max_sum = std::accumulate(ranked.doubled_ranks.begin(), ranked.doubled_ranks.end(), std::int64_t{0});
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item) {
      const auto r = static_cast<std::size_t>(ranked.doubled_ranks[item]);
      for (std::size_t j = std::min(item + 1, n1); j >= 1; --j)
        for (std::size_t s = static_cast<std::size_t>(max_sum); s >= r; --s) ways[j][s] += ways[j - 1][s - r];
    }
    // doubled expectation n1 (n + 1)
    const auto centre2 = static_cast<std::int64_t>(n1 * (n + 1));
    const auto observed = std::llabs(w2 - centre2);
    double total = 0.0, extreme = 0.0;
    for (std::size_t s = 0; s <= static_cast<std::size_t>(max_sum); ++s) {
      total += ways[n1][s];
      if (std::llabs(static_cast<std::int64_t>(s) - centre2) >= observed) extreme += ways[n1][s];
    }
    result.p_value = std::min(1.0, extreme / total);
    result.exact = true;
    return result;
  }

  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2), dn = static_cast<double>(n);
  const double expected = dn1 * (dn + 1.0) / 2.0;
  const double variance = dn1 * dn2 / 12.0 * ((dn + 1.0) - ranked.tie_term / (dn * (dn - 1.0)));
  if (variance <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::abs(result.statistic - expected) - 0.5) / std::sqrt(variance);
  result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

}  // namespace lpdgcn
