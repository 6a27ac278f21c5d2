#include "skelgait/regression_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skelgait/errors.hpp"
#include "skelgait/rng.hpp"

namespace skelgait {

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ShapeError("spearman: lengths differ (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.size() < 3) return std::nullopt;
  return pearson(average_ranks(a), average_ranks(b));
}

RegressionReport evaluate_regression(const std::vector<double>& predicted,
                                     const std::vector<double>& actual, std::size_t permutations,
                                     std::uint64_t seed) {
  if (predicted.size() != actual.size()) {
    throw ShapeError("evaluate_regression: " + std::to_string(predicted.size()) +
                     " predictions for " + std::to_string(actual.size()) + " targets");
  }
  if (predicted.empty()) throw ValidationError("evaluate_regression: no samples");
  RegressionReport r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    r.mean_abs_error += std::abs(predicted[i] - actual[i]);
  }
  r.mean_abs_error /= static_cast<double>(predicted.size());
  r.spearman = spearman(predicted, actual);
  if (!r.spearman) return r;

  const std::vector<double> rank_actual = average_ranks(actual);
  std::vector<double> rank_pred = average_ranks(predicted);
  const double observed = std::abs(*r.spearman);
  Rng rng(seed);
  std::size_t extreme = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    rng.shuffle(rank_pred);
    const auto rho = pearson(rank_pred, rank_actual);
    // Guard against float noise making an equal statistic look smaller.
    if (rho && std::abs(*rho) >= observed - 1e-12) ++extreme;
  }
  r.p_value = static_cast<double>(1 + extreme) / static_cast<double>(1 + permutations);
  return r;
}

}  // namespace skelgait
