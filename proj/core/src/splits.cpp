#include "skelgait/splits.hpp"

#include <algorithm>
#include <unordered_set>

#include "skelgait/errors.hpp"
#include "skelgait/rng.hpp"

namespace skelgait {

std::string_view to_string(SplitMode mode) {
  return mode == SplitMode::random ? "random" : "block";
}

std::optional<SplitMode> parse_split_mode(std::string_view text) {
  if (text == "random") return SplitMode::random;
  if (text == "block") return SplitMode::block;
  return std::nullopt;
}

SplitPlan make_splits(const Dataset& ds, SplitMode mode, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw ValidationError("make_splits: need at least 2 folds");
  std::vector<std::string> subjects = ds.subjects();
  if (subjects.size() < n_folds) {
    throw ValidationError("make_splits: " + std::to_string(subjects.size()) +
                          " subjects cannot fill " + std::to_string(n_folds) + " folds");
  }
  if (mode == SplitMode::random) {
    Rng rng(seed);
    rng.shuffle(subjects);
  }
  SplitPlan plan;
  plan.mode = mode;
  const std::size_t n = subjects.size();
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::size_t begin = f * n / n_folds;
    const std::size_t end = (f + 1) * n / n_folds;
    plan.folds.emplace_back(subjects.begin() + static_cast<std::ptrdiff_t>(begin),
                            subjects.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return plan;
}

FoldData materialize_fold(const Dataset& ds, const SplitPlan& plan, std::size_t fold) {
  if (fold >= plan.size()) {
    throw ValidationError("materialize_fold: fold " + std::to_string(fold) + " of " +
                          std::to_string(plan.size()));
  }
  const std::unordered_set<std::string> test(plan.folds[fold].begin(), plan.folds[fold].end());
  FoldData out;
  out.train.topology = ds.topology;
  out.test.topology = ds.topology;
  for (const auto& seq : ds.sequences) {
    (test.count(seq.subject_id) ? out.test : out.train).sequences.push_back(seq);
  }
  return out;
}

}  // namespace skelgait
