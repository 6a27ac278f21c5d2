#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "skelgait/clip_features.hpp"
#include "skelgait/cross_validation.hpp"
#include "skelgait/gait_stats.hpp"
#include "skelgait/network.hpp"
#include "skelgait/preprocess.hpp"
#include "skelgait/splits.hpp"
#include "skelgait/svr.hpp"
#include "skelgait/synth.hpp"

namespace skelgait::cli {

/// Every setting the subcommands consume. Built from defaults, then a key=value file,
/// then --set overrides, in that order.
struct RunConfig {
  std::uint64_t seed = 0;
  PreprocessConfig preprocess;
  bool augment = false;
  NetworkConfig network;
  bool co_learning = false;
  CoLearningConfig skepxel;
  SvrConfig svr;
  ClipConfig clips;
  double tolerance = 0.5;
  std::size_t permutations = 10000;
  SplitMode split_mode = SplitMode::block;
  std::size_t folds = 10;
  SynthConfig synth;
  AngleOptions angles;

  /// Applies one assignment. Throws ConfigError naming the key for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  /// Network config with the seed and co-learning settings folded in.
  NetworkConfig network_config() const;
  EvaluationConfig evaluation_config() const;
  SynthConfig synth_config() const;

  /// Checks cross-field constraints; throws ConfigError.
  void validate() const;
};

/// All recognized keys with their current values, in a stable order.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg);

/// Parses `key = value` lines; '#' starts a comment. Errors name the file and line.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);
/// Parses a single "key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace skelgait::cli
