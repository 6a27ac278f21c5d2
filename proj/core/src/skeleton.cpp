#include "skelgait/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace skelgait {

std::string_view to_string(Label label) {
  return label == Label::TD ? "TD" : "ASD";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "TD") return Label::TD;
  if (text == "ASD") return Label::ASD;
  return std::nullopt;
}

void validate(const AdosRecord& record) {
  if (record.score < 0) {
    throw ValidationError("ADOS score must be >= 0, got " + std::to_string(record.score));
  }
  if (record.module_id != 1 && record.module_id != 2) {
    throw ValidationError("ADOS module must be 1 or 2, got " + std::to_string(record.module_id));
  }
  if (record.age_years < 3) {
    throw ValidationError("ADOS age must be >= 3, got " + std::to_string(record.age_years));
  }
}

std::string_view to_string(AugmentationKind kind) {
  switch (kind) {
    case AugmentationKind::jitter: return "jitter";
    case AugmentationKind::scale: return "scale";
    case AugmentationKind::translate_left: return "translate_left";
    case AugmentationKind::translate_right: return "translate_right";
    case AugmentationKind::flip_horizontal: return "flip_horizontal";
    case AugmentationKind::flip_vertical: return "flip_vertical";
    case AugmentationKind::slice: return "slice";
  }
  return "unknown";
}

std::optional<AugmentationKind> parse_augmentation(std::string_view text) {
  for (AugmentationKind kind : kAllAugmentations) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::string Provenance::to_string() const {
  if (!augmentation) return "original";
  return "augmented:" + std::string(skelgait::to_string(*augmentation));
}

Provenance Provenance::parse(std::string_view text) {
  if (text == "original") return {};
  constexpr std::string_view prefix = "augmented:";
  if (text.starts_with(prefix)) {
    if (auto kind = parse_augmentation(text.substr(prefix.size()))) return Provenance{kind};
  }
  throw ValidationError("unknown provenance '" + std::string(text) + "'");
}

void validate(const SkeletonSequence& seq) {
  const std::string who = "sequence '" + seq.subject_id + "'";
  if (seq.channels() != kCoordinateChannels) {
    throw ValidationError(who + ": expected 3 coordinate channels, got " +
                          std::to_string(seq.channels()));
  }
  if (seq.frames() < 1) throw ValidationError(who + ": no frames");
  if (seq.joints() != kBodyJoints && seq.joints() != kUpperBodyJoints) {
    throw ValidationError(who + ": joint count must be 25 or 10, got " +
                          std::to_string(seq.joints()));
  }
  for (std::size_t c = 0; c < seq.channels(); ++c) {
    for (std::size_t t = 0; t < seq.frames(); ++t) {
      for (std::size_t j = 0; j < seq.joints(); ++j) {
        if (!std::isfinite(seq.data(c, t, j))) {
          throw ValidationError(who + ": non-finite coordinate at frame " + std::to_string(t) +
                                " joint " + std::to_string(j) + " channel " + std::to_string(c));
        }
      }
    }
  }
  if (seq.frame_rate && !(*seq.frame_rate > 0.0 && std::isfinite(*seq.frame_rate))) {
    throw ValidationError(who + ": frame rate must be positive");
  }
  if (seq.ados) validate(*seq.ados);
}

std::optional<std::size_t> SkeletonTopology::find(std::string_view name) const {
  for (std::size_t i = 0; i < joint_names.size(); ++i) {
    if (joint_names[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

SkeletonTopology make_kinect25() {
  using namespace joint;
  SkeletonTopology topo;
  topo.joint_names = {
      "SpineBase",     "SpineMid",     "Neck",         "Head",          "ShoulderLeft",
      "ElbowLeft",     "WristLeft",    "HandLeft",     "ShoulderRight", "ElbowRight",
      "WristRight",    "HandRight",    "HipLeft",      "KneeLeft",      "AnkleLeft",
      "FootLeft",      "HipRight",     "KneeRight",    "AnkleRight",    "FootRight",
      "SpineShoulder", "HandTipLeft",  "ThumbLeft",    "HandTipRight",  "ThumbRight",
  };
  topo.edges = {
      {spine_base, spine_mid},         {spine_mid, spine_shoulder},
      {spine_shoulder, neck},          {neck, head},
      {spine_shoulder, shoulder_left}, {shoulder_left, elbow_left},
      {elbow_left, wrist_left},        {wrist_left, hand_left},
      {hand_left, hand_tip_left},      {hand_left, thumb_left},
      {spine_shoulder, shoulder_right}, {shoulder_right, elbow_right},
      {elbow_right, wrist_right},      {wrist_right, hand_right},
      {hand_right, hand_tip_right},    {hand_right, thumb_right},
      {spine_base, hip_left},          {hip_left, knee_left},
      {knee_left, ankle_left},         {ankle_left, foot_left},
      {spine_base, hip_right},         {hip_right, knee_right},
      {knee_right, ankle_right},       {ankle_right, foot_right},
  };
  topo.spine_index = spine_mid;
  topo.neck_index = neck;
  topo.shoulder_left_index = shoulder_left;
  topo.shoulder_right_index = shoulder_right;
  topo.head_gaze_index = head;
  // 5 arm joints then 3 leg joints per side.
  topo.left_group = {shoulder_left, elbow_left, wrist_left, hand_left, hand_tip_left,
                     hip_left,      knee_left,  ankle_left};
  topo.right_group = {shoulder_right, elbow_right, wrist_right, hand_right, hand_tip_right,
                      hip_right,      knee_right,  ankle_right};
  topo.mirror.resize(kBodyJoints);
  std::iota(topo.mirror.begin(), topo.mirror.end(), std::size_t{0});
  const std::array<Edge, 10> pairs = {{{shoulder_left, shoulder_right},
                                       {elbow_left, elbow_right},
                                       {wrist_left, wrist_right},
                                       {hand_left, hand_right},
                                       {hip_left, hip_right},
                                       {knee_left, knee_right},
                                       {ankle_left, ankle_right},
                                       {foot_left, foot_right},
                                       {hand_tip_left, hand_tip_right},
                                       {thumb_left, thumb_right}}};
  for (auto [l, r] : pairs) {
    topo.mirror[l] = r;
    topo.mirror[r] = l;
  }
  return topo;
}

}  // namespace

const SkeletonTopology& default_topology() {
  static const SkeletonTopology topo = make_kinect25();
  return topo;
}

void validate(const SkeletonTopology& topo) {
  const std::size_t n = topo.size();
  if (n == 0) throw ValidationError("topology has no joints");
  if (topo.edges.size() != n - 1) {
    throw ValidationError("topology must be a tree: expected " + std::to_string(n - 1) +
                          " edges, got " + std::to_string(topo.edges.size()));
  }
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : topo.edges) {
    if (a >= n || b >= n || a == b) throw ValidationError("topology edge out of range");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{topo.spine_index};
  seen.at(topo.spine_index) = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != n) throw ValidationError("topology graph is not connected");

  if (topo.left_group.size() != topo.right_group.size()) {
    throw ValidationError("left and right joint groups differ in length");
  }
  std::set<std::size_t> left(topo.left_group.begin(), topo.left_group.end());
  for (std::size_t i = 0; i < topo.right_group.size(); ++i) {
    if (left.contains(topo.right_group[i])) {
      throw ValidationError("left and right joint groups overlap");
    }
    if (topo.mirror.size() == n && topo.mirror[topo.left_group[i]] != topo.right_group[i]) {
      throw ValidationError("left/right groups are not mirror-ordered");
    }
  }
  if (topo.mirror.size() != n) throw ValidationError("mirror map must cover every joint");
  for (std::size_t i = 0; i < n; ++i) {
    if (topo.mirror[i] >= n || topo.mirror[topo.mirror[i]] != i) {
      throw ValidationError("mirror map is not an involution");
    }
  }
  for (std::size_t idx : {topo.spine_index, topo.neck_index, topo.shoulder_left_index,
                          topo.shoulder_right_index, topo.head_gaze_index}) {
    if (idx >= n) throw ValidationError("topology landmark index out of range");
  }
}

const std::array<std::string_view, kUpperBodyJoints>& upper_body_joint_names() {
  static const std::array<std::string_view, kUpperBodyJoints> names = {
      "Head",         "SpineShoulder", "ShoulderLeft", "ElbowLeft", "WristLeft",
      "HandLeft",     "ShoulderRight", "ElbowRight",   "WristRight", "HandRight",
  };
  return names;
}

const std::array<std::size_t, kUpperBodyJoints>& upper_body_joint_indices() {
  using namespace joint;
  static const std::array<std::size_t, kUpperBodyJoints> idx = {
      head,      spine_shoulder, shoulder_left, elbow_left,  wrist_left,
      hand_left, shoulder_right, elbow_right,   wrist_right, hand_right,
  };
  return idx;
}

bool Dataset::requires_completion() const {
  return std::any_of(sequences.begin(), sequences.end(),
                     [](const SkeletonSequence& s) { return s.joints() == kUpperBodyJoints; });
}

std::vector<std::string> Dataset::subjects() const {
  std::set<std::string> ids;
  for (const auto& s : sequences) ids.insert(s.subject_id);
  return {ids.begin(), ids.end()};
}

void validate(const Dataset& ds) {
  std::set<std::string> originals;
  for (const auto& s : ds.sequences) {
    validate(s);
    if (s.provenance.is_original()) originals.insert(s.subject_id);
  }
  for (const auto& s : ds.sequences) {
    if (!s.provenance.is_original() && !originals.contains(s.subject_id)) {
      throw ValidationError("augmented record for subject '" + s.subject_id +
                            "' has no original in the dataset");
    }
  }
}

}  // namespace skelgait
