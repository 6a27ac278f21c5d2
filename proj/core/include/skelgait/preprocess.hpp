#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "skelgait/skeleton.hpp"

namespace skelgait {

struct PreprocessConfig {
  std::size_t target_frames = 40;
  /// Rigid view alignment; off for gait recordings, on for upper-body (DREAM-style) recordings.
  bool apply_rotation = false;
  /// Translate each frame's spine joint to the origin (implied by apply_rotation).
  bool center_spine = true;
  bool gaze_as_joint = false;
  double epsilon = 1e-8;

  // Augmentation magnitudes.
  double jitter_sigma = 0.01;
  double scale_min = 0.9;
  double scale_max = 1.1;
  double translate_offset = 0.1;
  double slice_fraction = 0.8;
};

/// Throws ConfigError for out-of-range values.
void validate(const PreprocessConfig& cfg);

/// Rotates every frame by the rotation that maps frame 0's spine axis (spine -> neck)
/// onto +z and its shoulder axis (left -> right, orthogonalized) onto +x, then
/// translates the spine joint of each frame to the origin.
SkeletonSequence view_invariant_transform(const SkeletonSequence& seq,
                                          const SkeletonTopology& topo = default_topology(),
                                          double epsilon = 1e-8);

/// Body proportions used to synthesize the 15 joints missing from upper-body recordings.
/// Every offset is a multiple of the torso reference length, the shoulder width
/// |ShoulderRight - ShoulderLeft| of the frame.
struct CompletionRatios {
  double neck = 0.33;        ///< SpineShoulder -> Neck, toward the head
  double spine_mid = 0.85;   ///< SpineShoulder -> SpineMid, down the spine
  double spine_base = 1.65;  ///< SpineShoulder -> SpineBase
  double hip = 0.3;          ///< lateral hip offset from SpineBase
  double thigh = 1.35;       ///< hip -> knee
  double shank = 1.3;        ///< knee -> ankle
  double foot = 0.4;         ///< ankle -> foot, forward
  double hand_tip = 0.27;    ///< hand -> hand tip along the forearm direction
  double thumb = 0.17;       ///< hand -> thumb
};

/// Expands a 10-joint upper-body recording (order of upper_body_joint_names()) to 25 joints.
/// Missing joints are extrapolated down the spine direction with offsets proportional to the
/// torso reference length; mirrored joints are placed symmetrically about the spine axis.
SkeletonSequence complete_upper_body(const SkeletonSequence& seq,
                                     const CompletionRatios& ratios = {},
                                     double epsilon = 1e-8);

using GazeSample = std::optional<std::array<double, 3>>;

/// Writes the gaze vector into the head-gaze joint. Missing samples take the most recent
/// preceding value; leading gaps take the first available value.
SkeletonSequence inject_gaze_joint(const SkeletonSequence& seq, const std::vector<GazeSample>& gaze,
                                   const SkeletonTopology& topo = default_topology());

/// Subtracts each frame's spine joint from every joint of that frame.
SkeletonSequence center_on_spine(const SkeletonSequence& seq,
                                 const SkeletonTopology& topo = default_topology());

/// Fixed-length output: cyclic repetition from the start when short, truncation when long.
SkeletonSequence regularize_length(const SkeletonSequence& seq, std::size_t target_frames);

/// One deterministic augmentation. The result keeps subject, label, C, T and J.
SkeletonSequence augment(const SkeletonSequence& seq, AugmentationKind kind, std::uint64_t seed,
                         const PreprocessConfig& cfg = {},
                         const SkeletonTopology& topo = default_topology());

/// All seven augmentations of one original.
std::vector<SkeletonSequence> augment_all(const SkeletonSequence& seq, std::uint64_t seed,
                                          const PreprocessConfig& cfg = {},
                                          const SkeletonTopology& topo = default_topology());

/// Appends seven augmented records after each original, yielding 8 records per subject.
Dataset augment_dataset(const Dataset& ds, std::uint64_t seed, const PreprocessConfig& cfg = {});

/// Standard pipeline: upper-body completion when needed, optional rotation or spine centering,
/// fixed length.
SkeletonSequence preprocess_sequence(const SkeletonSequence& seq, const PreprocessConfig& cfg,
                                     const SkeletonTopology& topo = default_topology());
Dataset preprocess_dataset(const Dataset& ds, const PreprocessConfig& cfg);

}  // namespace skelgait
