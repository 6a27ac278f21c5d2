#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skelgait/tensor.hpp"

namespace skelgait {

inline constexpr std::size_t kCoordinateChannels = 3;
inline constexpr std::size_t kBodyJoints = 25;
inline constexpr std::size_t kUpperBodyJoints = 10;

enum class Label { TD, ASD };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

struct AdosRecord {
  int score = 0;
  int module_id = 1;
  int age_years = 3;

  friend bool operator==(const AdosRecord&, const AdosRecord&) = default;
};

/// Throws ValidationError if the record breaks score >= 0, module in {1,2}, age >= 3.
void validate(const AdosRecord& record);

enum class AugmentationKind {
  jitter,
  scale,
  translate_left,
  translate_right,
  flip_horizontal,
  flip_vertical,
  slice,
};

inline constexpr std::array<AugmentationKind, 7> kAllAugmentations = {
    AugmentationKind::jitter,          AugmentationKind::scale,
    AugmentationKind::translate_left,  AugmentationKind::translate_right,
    AugmentationKind::flip_horizontal, AugmentationKind::flip_vertical,
    AugmentationKind::slice,
};

std::string_view to_string(AugmentationKind kind);
std::optional<AugmentationKind> parse_augmentation(std::string_view text);

/// Either an original recording or an augmented copy of one.
struct Provenance {
  std::optional<AugmentationKind> augmentation;

  bool is_original() const noexcept { return !augmentation.has_value(); }
  /// "original" or "augmented:<kind>".
  std::string to_string() const;
  static Provenance parse(std::string_view text);

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// One subject recording: coordinates as channels x frames x joints (meters).
struct SkeletonSequence {
  Tensor3 data;
  std::string subject_id;
  std::optional<double> frame_rate;
  std::optional<Label> label;
  std::optional<AdosRecord> ados;
  Provenance provenance;

  std::size_t channels() const noexcept { return data.channels(); }
  std::size_t frames() const noexcept { return data.frames(); }
  std::size_t joints() const noexcept { return data.joints(); }

  friend bool operator==(const SkeletonSequence&, const SkeletonSequence&) = default;
};

/// Throws ValidationError unless C == 3, T >= 1, J in {10, 25} and all values are finite.
void validate(const SkeletonSequence& seq);

/// Kinect-v2 joint indices used by the default topology.
namespace joint {
inline constexpr std::size_t spine_base = 0;
inline constexpr std::size_t spine_mid = 1;
inline constexpr std::size_t neck = 2;
inline constexpr std::size_t head = 3;
inline constexpr std::size_t shoulder_left = 4;
inline constexpr std::size_t elbow_left = 5;
inline constexpr std::size_t wrist_left = 6;
inline constexpr std::size_t hand_left = 7;
inline constexpr std::size_t shoulder_right = 8;
inline constexpr std::size_t elbow_right = 9;
inline constexpr std::size_t wrist_right = 10;
inline constexpr std::size_t hand_right = 11;
inline constexpr std::size_t hip_left = 12;
inline constexpr std::size_t knee_left = 13;
inline constexpr std::size_t ankle_left = 14;
inline constexpr std::size_t foot_left = 15;
inline constexpr std::size_t hip_right = 16;
inline constexpr std::size_t knee_right = 17;
inline constexpr std::size_t ankle_right = 18;
inline constexpr std::size_t foot_right = 19;
inline constexpr std::size_t spine_shoulder = 20;
inline constexpr std::size_t hand_tip_left = 21;
inline constexpr std::size_t thumb_left = 22;
inline constexpr std::size_t hand_tip_right = 23;
inline constexpr std::size_t thumb_right = 24;
}  // namespace joint

using Edge = std::pair<std::size_t, std::size_t>;

/// Joint graph plus the semantic groups the analyses rely on.
struct SkeletonTopology {
  std::vector<std::string> joint_names;
  std::vector<Edge> edges;
  /// Center joint: origin for alignment, angles and spine distances.
  std::size_t spine_index = 0;
  /// Upper end of the spine axis (spine -> neck).
  std::size_t neck_index = 0;
  std::size_t shoulder_left_index = 0;
  std::size_t shoulder_right_index = 0;
  /// Joint that receives the eye-gaze vector.
  std::size_t head_gaze_index = 0;
  /// Mirrored lateral joints; position i of left_group mirrors position i of right_group.
  std::vector<std::size_t> left_group;
  std::vector<std::size_t> right_group;
  /// Full left/right mirror permutation over all joints (self for midline joints).
  std::vector<std::size_t> mirror;

  std::size_t size() const noexcept { return joint_names.size(); }
  std::optional<std::size_t> find(std::string_view name) const;
};

/// The fixed 25-joint Kinect-v2 body tree.
const SkeletonTopology& default_topology();

/// Throws ValidationError unless the edges form a spanning tree and the groups are consistent.
void validate(const SkeletonTopology& topo);

/// Names and default-topology indices of the 10 joints in raw upper-body recordings, in file order.
const std::array<std::string_view, kUpperBodyJoints>& upper_body_joint_names();
const std::array<std::size_t, kUpperBodyJoints>& upper_body_joint_indices();

struct Dataset {
  std::vector<SkeletonSequence> sequences;
  SkeletonTopology topology = default_topology();

  std::size_t size() const noexcept { return sequences.size(); }
  bool empty() const noexcept { return sequences.empty(); }
  /// True if any record is a 10-joint upper-body recording.
  bool requires_completion() const;
  /// Distinct subject ids in sorted order.
  std::vector<std::string> subjects() const;
};

/// Checks every sequence and that each augmented record has an original with the same subject.
void validate(const Dataset& ds);

}  // namespace skelgait
