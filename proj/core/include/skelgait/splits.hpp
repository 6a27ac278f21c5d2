#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skelgait/skeleton.hpp"

namespace skelgait {

enum class SplitMode { random, block };

std::string_view to_string(SplitMode mode);
std::optional<SplitMode> parse_split_mode(std::string_view text);

/// Subject-level cross-validation folds.
struct SplitPlan {
  SplitMode mode = SplitMode::block;
  /// Test subjects of each fold.
  std::vector<std::vector<std::string>> folds;

  std::size_t size() const noexcept { return folds.size(); }
};

/// Fold f holds positions [f n / k, (f + 1) n / k) of the subject order: sorted ids in
/// block mode, a seeded shuffle of them in random mode. Throws ValidationError when there
/// are fewer subjects than folds or n_folds < 2.
SplitPlan make_splits(const Dataset& ds, SplitMode mode, std::size_t n_folds = 10,
                      std::uint64_t seed = 0);

struct FoldData {
  Dataset train;
  Dataset test;
};

/// Every record (original or augmented) follows its subject to the test side of fold
/// `fold` or to the train side, preserving record order.
FoldData materialize_fold(const Dataset& ds, const SplitPlan& plan, std::size_t fold);

}  // namespace skelgait
