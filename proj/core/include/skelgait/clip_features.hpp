#pragma once

#include <vector>

#include <Eigen/Core>

#include "skelgait/network.hpp"

namespace skelgait {

struct ClipConfig {
  std::size_t clip_frames = 20;
  /// Clips kept per video; shorter videos are zero-padded, longer ones truncated.
  std::size_t n_clips = 4;
};

void validate(const ClipConfig& cfg);

struct ClipFeatures {
  /// Pooled network embedding of each real clip, in temporal order.
  std::vector<Eigen::VectorXd> clips;
  /// Concatenation of n_clips embeddings, zero vectors after the real clips.
  Eigen::VectorXd video;
};

/// Splits the sequence into consecutive clips of clip_frames (a short last clip is cyclically
/// repeated up to clip_frames) and embeds each with forward_network. Throws ValidationError for
/// an untrained network.
ClipFeatures extract_clip_features(const SkeletonSequence& seq, const Network& net,
                                   const ClipConfig& cfg);

}  // namespace skelgait
