#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skelgait/clip_features.hpp"
#include "skelgait/network.hpp"
#include "skelgait/splits.hpp"
#include "skelgait/svr.hpp"

namespace skelgait {

/// Fits the ADOS regressor on video-level clip features of every record with an ADOS record.
/// Throws ValidationError when fewer than 2 such records exist.
SvrFit fit_score_regressor(const Network& net, const Dataset& ds, const ClipConfig& clips,
                           const SvrConfig& svr);

double predict_score(const Network& net, const SvrModel& svr, const ClipConfig& clips,
                     const SkeletonSequence& seq);

struct EvaluationConfig {
  NetworkConfig network;
  ClipConfig clips;
  SvrConfig svr;
  double tolerance = 0.5;
  SplitMode mode = SplitMode::block;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t permutations = 10000;
};

struct FoldReport {
  std::size_t fold = 0;
  std::size_t train_records = 0;
  std::size_t test_records = 0;
  double classification_accuracy = 0.0;
  /// Regression columns; empty when the records carry no ADOS scores.
  std::optional<double> mean_abs_error;
  std::optional<double> spearman;
  std::optional<double> p_value;
  std::optional<double> ados_accuracy;
};

/// Subject-level k-fold run: per fold, train the classifier, then (when every record has an
/// ADOS record) fit the score regressor on the training side and score the test side.
std::vector<FoldReport> cross_validate(const Dataset& ds, const EvaluationConfig& cfg);

}  // namespace skelgait
