#include "skelgait/clip_features.hpp"

#include <algorithm>

#include "skelgait/preprocess.hpp"

namespace skelgait {

void validate(const ClipConfig& cfg) {
  if (cfg.clip_frames == 0) throw ConfigError("clips: clip_frames must be >= 1");
  if (cfg.n_clips == 0) throw ConfigError("clips: n_clips must be >= 1");
}

ClipFeatures extract_clip_features(const SkeletonSequence& seq, const Network& net,
                                   const ClipConfig& cfg) {
  validate(cfg);
  if (!net.trained) throw ValidationError("extract_clip_features: network is not trained");
  const std::size_t T = seq.frames();
  if (T == 0) throw ShapeError("extract_clip_features: sequence has no frames");
  const std::size_t C = seq.channels();
  const std::size_t J = seq.joints();

  ClipFeatures out;
  for (std::size_t start = 0; start < T && out.clips.size() < cfg.n_clips;
       start += cfg.clip_frames) {
    const std::size_t len = std::min(cfg.clip_frames, T - start);
    SkeletonSequence clip;
    clip.subject_id = seq.subject_id;
    clip.data = Tensor3(C, len, J);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t j = 0; j < J; ++j) clip.data(c, t, j) = seq.data(c, start + t, j);
      }
    }
    if (len < cfg.clip_frames) clip = regularize_length(clip, cfg.clip_frames);
    out.clips.push_back(forward_network(net, network_input(clip, net.config)).embedding);
  }

  const auto d = static_cast<Eigen::Index>(net.embedding_dim());
  out.video = Eigen::VectorXd::Zero(d * static_cast<Eigen::Index>(cfg.n_clips));
  for (std::size_t k = 0; k < out.clips.size(); ++k) {
    out.video.segment(static_cast<Eigen::Index>(k) * d, d) = out.clips[k];
  }
  return out;
}

}  // namespace skelgait
