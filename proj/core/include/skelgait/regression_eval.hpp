#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace skelgait {

struct RegressionReport {
  double mean_abs_error = 0.0;
  /// Empty with fewer than 3 pairs or when either side has no rank variation.
  std::optional<double> spearman;
  /// Two-sided permutation p-value of |spearman|; empty whenever spearman is.
  std::optional<double> p_value;
};

/// Ranks starting at 1, ties receiving their average rank.
std::vector<double> average_ranks(const std::vector<double>& values);

/// Spearman correlation: Pearson correlation of the average ranks.
std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b);

/// p = (1 + #{perm : |rho_perm| >= |rho|}) / (1 + permutations), permuting `predicted`.
RegressionReport evaluate_regression(const std::vector<double>& predicted,
                                     const std::vector<double>& actual,
                                     std::size_t permutations = 10000, std::uint64_t seed = 0);

}  // namespace skelgait
