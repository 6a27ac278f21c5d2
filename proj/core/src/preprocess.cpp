#include "skelgait/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "skelgait/rng.hpp"

namespace skelgait {

namespace {

Eigen::Vector3d point(const SkeletonSequence& seq, std::size_t t, std::size_t j) {
  return {seq.data(0, t, j), seq.data(1, t, j), seq.data(2, t, j)};
}

void set_point(SkeletonSequence& seq, std::size_t t, std::size_t j, const Eigen::Vector3d& p) {
  for (std::size_t c = 0; c < 3; ++c) seq.data(c, t, j) = p[static_cast<Eigen::Index>(c)];
}

void require_full_body(const SkeletonSequence& seq, const SkeletonTopology& topo, const char* op) {
  if (seq.channels() != kCoordinateChannels || seq.joints() != topo.size()) {
    throw ShapeError(std::string(op) + ": expected 3 x T x " + std::to_string(topo.size()) +
                     ", got " + seq.data.shape_string());
  }
  if (seq.frames() == 0) throw ShapeError(std::string(op) + ": sequence has no frames");
}

}  // namespace

void validate(const PreprocessConfig& cfg) {
  if (cfg.target_frames < 1) throw ConfigError("target_frames must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(cfg.jitter_sigma >= 0.0)) throw ConfigError("jitter_sigma must be >= 0");
  if (!(cfg.scale_min > 0.0 && cfg.scale_min <= cfg.scale_max)) {
    throw ConfigError("scale range must satisfy 0 < scale_min <= scale_max");
  }
  if (!(cfg.slice_fraction > 0.0 && cfg.slice_fraction <= 1.0)) {
    throw ConfigError("slice_fraction must lie in (0, 1]");
  }
}

SkeletonSequence view_invariant_transform(const SkeletonSequence& seq,
                                          const SkeletonTopology& topo, double epsilon) {
  require_full_body(seq, topo, "view_invariant_transform");
  const Eigen::Vector3d spine = point(seq, 0, topo.spine_index);
  const Eigen::Vector3d up = point(seq, 0, topo.neck_index) - spine;
  if (up.norm() <= epsilon) {
    throw PreprocessError("view_invariant_transform: degenerate spine axis between " +
                          topo.joint_names[topo.spine_index] + " and " +
                          topo.joint_names[topo.neck_index] + " in frame 0");
  }
  const Eigen::Vector3d z = up.normalized();
  const Eigen::Vector3d shoulders =
      point(seq, 0, topo.shoulder_right_index) - point(seq, 0, topo.shoulder_left_index);
  const Eigen::Vector3d lateral = shoulders - shoulders.dot(z) * z;
  if (shoulders.norm() <= epsilon || lateral.norm() <= epsilon * std::max(1.0, shoulders.norm())) {
    throw PreprocessError("view_invariant_transform: degenerate shoulder axis between " +
                          topo.joint_names[topo.shoulder_left_index] + " and " +
                          topo.joint_names[topo.shoulder_right_index] + " in frame 0");
  }
  const Eigen::Vector3d x = lateral.normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d rot;
  rot.row(0) = x.transpose();
  rot.row(1) = y.transpose();
  rot.row(2) = z.transpose();

  SkeletonSequence out = seq;
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    const Eigen::Vector3d origin = point(seq, t, topo.spine_index);
    for (std::size_t j = 0; j < seq.joints(); ++j) {
      set_point(out, t, j, rot * (point(seq, t, j) - origin));
    }
  }
  return out;
}

SkeletonSequence complete_upper_body(const SkeletonSequence& seq, const CompletionRatios& r,
                                     double epsilon) {
  if (seq.joints() != kUpperBodyJoints || seq.channels() != kCoordinateChannels) {
    throw ShapeError("complete_upper_body: expected 3 x T x 10 upper-body input, got " +
                     seq.data.shape_string());
  }
  using namespace joint;
  const auto& names = upper_body_joint_names();
  const auto& target = upper_body_joint_indices();
  const SkeletonTopology& topo = default_topology();
  for (std::size_t i = 0; i < kUpperBodyJoints; ++i) {
    auto found = topo.find(names[i]);
    if (!found || *found != target[i]) {
      throw PreprocessError("complete_upper_body: joint '" + std::string(names[i]) +
                            "' does not map onto the body topology");
    }
  }

  SkeletonSequence out = seq;
  out.data = Tensor3(kCoordinateChannels, seq.frames(), kBodyJoints);
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    Eigen::Vector3d p[kBodyJoints];
    for (std::size_t i = 0; i < kUpperBodyJoints; ++i) p[target[i]] = point(seq, t, i);

    const Eigen::Vector3d shoulders = p[shoulder_right] - p[shoulder_left];
    const double length = shoulders.norm();
    if (length <= epsilon) {
      throw PreprocessError("complete_upper_body: zero torso length (ShoulderLeft == "
                            "ShoulderRight) in frame " + std::to_string(t));
    }
    const Eigen::Vector3d down_raw = p[spine_shoulder] - p[head];
    if (down_raw.norm() <= epsilon) {
      throw PreprocessError("complete_upper_body: degenerate spine direction (Head == "
                            "SpineShoulder) in frame " + std::to_string(t));
    }
    const Eigen::Vector3d down = down_raw.normalized();
    Eigen::Vector3d lateral = shoulders - shoulders.dot(down) * down;
    if (lateral.norm() <= epsilon) {
      throw PreprocessError("complete_upper_body: shoulder axis parallel to the spine in frame " +
                            std::to_string(t));
    }
    lateral.normalize();
    const Eigen::Vector3d forward = down.cross(lateral);

    const Eigen::Vector3d& top = p[spine_shoulder];
    p[neck] = top - down * (r.neck * length);
    p[spine_mid] = top + down * (r.spine_mid * length);
    p[spine_base] = top + down * (r.spine_base * length);
    for (int side : {-1, 1}) {
      const bool left = side < 0;
      const std::size_t hip = left ? hip_left : hip_right;
      const std::size_t knee = left ? knee_left : knee_right;
      const std::size_t ankle = left ? ankle_left : ankle_right;
      const std::size_t foot = left ? foot_left : foot_right;
      p[hip] = p[spine_base] + lateral * (side * r.hip * length);
      p[knee] = p[hip] + down * (r.thigh * length);
      p[ankle] = p[knee] + down * (r.shank * length);
      p[foot] = p[ankle] + forward * (r.foot * length);

      const std::size_t hand = left ? hand_left : hand_right;
      const std::size_t wrist = left ? wrist_left : wrist_right;
      Eigen::Vector3d dir = p[hand] - p[wrist];
      dir = dir.norm() > epsilon ? dir.normalized() : down;
      p[left ? hand_tip_left : hand_tip_right] = p[hand] + dir * (r.hand_tip * length);
      p[left ? thumb_left : thumb_right] = p[hand] + dir * (r.thumb * length);
    }
    for (std::size_t j = 0; j < kBodyJoints; ++j) set_point(out, t, j, p[j]);
  }
  return out;
}

SkeletonSequence inject_gaze_joint(const SkeletonSequence& seq, const std::vector<GazeSample>& gaze,
                                   const SkeletonTopology& topo) {
  require_full_body(seq, topo, "inject_gaze_joint");
  if (gaze.size() != seq.frames()) {
    throw ShapeError("inject_gaze_joint: gaze has " + std::to_string(gaze.size()) +
                     " samples for " + std::to_string(seq.frames()) + " frames");
  }
  auto first = std::find_if(gaze.begin(), gaze.end(), [](const GazeSample& g) { return g.has_value(); });
  if (first == gaze.end()) throw PreprocessError("inject_gaze_joint: every gaze sample is missing");

  SkeletonSequence out = seq;
  std::array<double, 3> current = **first;
  for (std::size_t t = 0; t < gaze.size(); ++t) {
    if (gaze[t]) current = *gaze[t];
    for (std::size_t c = 0; c < 3; ++c) out.data(c, t, topo.head_gaze_index) = current[c];
  }
  return out;
}

SkeletonSequence regularize_length(const SkeletonSequence& seq, std::size_t target_frames) {
  if (seq.frames() == 0) throw ShapeError("regularize_length: sequence has no frames");
  if (target_frames == 0) throw ConfigError("regularize_length: target length must be >= 1");
  if (seq.frames() == target_frames) return seq;
  SkeletonSequence out = seq;
  out.data = Tensor3(seq.channels(), target_frames, seq.joints());
  for (std::size_t c = 0; c < seq.channels(); ++c) {
    for (std::size_t t = 0; t < target_frames; ++t) {
      const std::size_t src = t % seq.frames();
      for (std::size_t j = 0; j < seq.joints(); ++j) out.data(c, t, j) = seq.data(c, src, j);
    }
  }
  return out;
}

SkeletonSequence augment(const SkeletonSequence& seq, AugmentationKind kind, std::uint64_t seed,
                         const PreprocessConfig& cfg, const SkeletonTopology& topo) {
  if (seq.frames() == 0) throw ShapeError("augment: sequence has no frames");
  Rng rng(seed);
  SkeletonSequence out = seq;
  out.provenance = Provenance{kind};
  Tensor3& x = out.data;
  const std::size_t frames = seq.frames();
  const std::size_t joints = seq.joints();

  switch (kind) {
    case AugmentationKind::jitter:
      for (double& v : x.values()) v += rng.normal(0.0, cfg.jitter_sigma);
      break;
    case AugmentationKind::scale: {
      const double factor = rng.uniform(cfg.scale_min, cfg.scale_max);
      for (double& v : x.values()) v *= factor;
      break;
    }
    case AugmentationKind::translate_left:
    case AugmentationKind::translate_right: {
      const double dx = kind == AugmentationKind::translate_left ? -cfg.translate_offset
                                                                 : cfg.translate_offset;
      for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t j = 0; j < joints; ++j) x(0, t, j) += dx;
      }
      break;
    }
    case AugmentationKind::flip_horizontal: {
      const bool swap = joints == topo.size() && topo.mirror.size() == joints;
      for (std::size_t c = 0; c < seq.channels(); ++c) {
        for (std::size_t t = 0; t < frames; ++t) {
          for (std::size_t j = 0; j < joints; ++j) {
            const std::size_t src = swap ? topo.mirror[j] : j;
            x(c, t, j) = c == 0 ? -seq.data(c, t, src) : seq.data(c, t, src);
          }
        }
      }
      break;
    }
    case AugmentationKind::flip_vertical:
      for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t j = 0; j < joints; ++j) x(1, t, j) = -x(1, t, j);
      }
      break;
    case AugmentationKind::slice: {
      const auto window = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(cfg.slice_fraction * static_cast<double>(frames))));
      const std::size_t start = static_cast<std::size_t>(rng.below(frames - window + 1));
      SkeletonSequence cropped = seq;
      cropped.data = Tensor3(seq.channels(), window, joints);
      for (std::size_t c = 0; c < seq.channels(); ++c) {
        for (std::size_t t = 0; t < window; ++t) {
          for (std::size_t j = 0; j < joints; ++j) cropped.data(c, t, j) = seq.data(c, start + t, j);
        }
      }
      out.data = regularize_length(cropped, frames).data;
      break;
    }
  }
  return out;
}

std::vector<SkeletonSequence> augment_all(const SkeletonSequence& seq, std::uint64_t seed,
                                          const PreprocessConfig& cfg, const SkeletonTopology& topo) {
  std::vector<SkeletonSequence> out;
  out.reserve(kAllAugmentations.size());
  for (std::size_t k = 0; k < kAllAugmentations.size(); ++k) {
    out.push_back(augment(seq, kAllAugmentations[k], derive_seed(seed, k), cfg, topo));
  }
  return out;
}

Dataset augment_dataset(const Dataset& ds, std::uint64_t seed, const PreprocessConfig& cfg) {
  Dataset out;
  out.topology = ds.topology;
  std::uint64_t index = 0;
  for (const auto& s : ds.sequences) {
    out.sequences.push_back(s);
    if (!s.provenance.is_original()) continue;
    for (auto& a : augment_all(s, derive_seed(seed, index++), cfg, ds.topology)) {
      out.sequences.push_back(std::move(a));
    }
  }
  return out;
}

SkeletonSequence center_on_spine(const SkeletonSequence& seq, const SkeletonTopology& topo) {
  require_full_body(seq, topo, "center_on_spine");
  SkeletonSequence out = seq;
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (std::size_t c = 0; c < seq.channels(); ++c) {
      const double origin = seq.data(c, t, topo.spine_index);
      for (std::size_t j = 0; j < seq.joints(); ++j) out.data(c, t, j) -= origin;
    }
  }
  return out;
}

SkeletonSequence preprocess_sequence(const SkeletonSequence& seq, const PreprocessConfig& cfg,
                                     const SkeletonTopology& topo) {
  validate(cfg);
  SkeletonSequence out = seq.joints() == kUpperBodyJoints ? complete_upper_body(seq, {}, cfg.epsilon)
                                                          : seq;
  if (cfg.apply_rotation) {
    out = view_invariant_transform(out, topo, cfg.epsilon);
  } else if (cfg.center_spine) {
    out = center_on_spine(out, topo);
  }
  return regularize_length(out, cfg.target_frames);
}

Dataset preprocess_dataset(const Dataset& ds, const PreprocessConfig& cfg) {
  Dataset out;
  out.topology = ds.topology;
  out.sequences.reserve(ds.size());
  for (const auto& s : ds.sequences) out.sequences.push_back(preprocess_sequence(s, cfg, ds.topology));
  return out;
}

}  // namespace skelgait
