#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Geometry>

#include "skelgait/errors.hpp"
#include "skelgait/preprocess.hpp"
#include "skelgait/rng.hpp"
#include "support.hpp"

using namespace skelgait;

namespace {

Eigen::Vector3d at(const SkeletonSequence& s, std::size_t t, std::size_t j) {
  return {s.data(0, t, j), s.data(1, t, j), s.data(2, t, j)};
}

SkeletonSequence transformed(const SkeletonSequence& s, const Eigen::Matrix3d& r,
                             const Eigen::Vector3d& v) {
  SkeletonSequence out = s;
  for (std::size_t t = 0; t < s.frames(); ++t) {
    for (std::size_t j = 0; j < s.joints(); ++j) {
      const Eigen::Vector3d p = r * at(s, t, j) + v;
      for (int c = 0; c < 3; ++c) out.data(c, t, j) = p[c];
    }
  }
  return out;
}

// Frame 0 has the spine axis on +z and the shoulders on x, spine at the origin.
SkeletonSequence aligned_sequence(std::size_t frames, std::uint64_t seed) {
  auto s = testing::random_sequence(frames, seed);
  for (std::size_t t = 0; t < frames; ++t) {
    for (int c = 0; c < 3; ++c) s.data(c, t, joint::spine_mid) = 0.0;
  }
  s.data(0, 0, joint::neck) = 0.0;
  s.data(1, 0, joint::neck) = 0.0;
  s.data(2, 0, joint::neck) = 0.4;
  s.data(0, 0, joint::shoulder_left) = -0.2;
  s.data(1, 0, joint::shoulder_left) = 0.0;
  s.data(0, 0, joint::shoulder_right) = 0.2;
  s.data(1, 0, joint::shoulder_right) = 0.0;
  s.data(2, 0, joint::shoulder_right) = s.data(2, 0, joint::shoulder_left);
  return s;
}

Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q.normalized().toRotationMatrix();
}

double max_pairwise_distance_change(const SkeletonSequence& a, const SkeletonSequence& b) {
  double worst = 0.0;
  for (std::size_t t = 0; t < a.frames(); ++t) {
    for (std::size_t i = 0; i < a.joints(); ++i) {
      for (std::size_t j = i + 1; j < a.joints(); ++j) {
        const double da = (at(a, t, i) - at(a, t, j)).norm();
        const double db = (at(b, t, i) - at(b, t, j)).norm();
        worst = std::max(worst, std::abs(da - db) / std::max(da, 1e-12));
      }
    }
  }
  return worst;
}

SkeletonSequence upper_body_tpose() {
  SkeletonSequence s;
  s.subject_id = "dream";
  s.data = Tensor3(3, 1, kUpperBodyJoints);
  // Head, SpineShoulder, then left arm out along -x and right arm along +x.
  const double pts[10][3] = {{0, 0, 1.6},    {0, 0, 1.4},    {-0.25, 0, 1.4}, {-0.5, 0, 1.4},
                             {-0.7, 0, 1.4}, {-0.78, 0, 1.4}, {0.25, 0, 1.4},  {0.5, 0, 1.4},
                             {0.7, 0, 1.4},  {0.78, 0, 1.4}};
  for (std::size_t j = 0; j < 10; ++j) {
    for (int c = 0; c < 3; ++c) s.data(c, 0, j) = pts[j][c];
  }
  return s;
}

}  // namespace

TEST_CASE("view transform leaves an aligned skeleton unchanged") {
  const auto s = aligned_sequence(5, 3);
  const auto out = view_invariant_transform(s);
  CHECK(testing::max_abs_diff(out.data, s.data) <= 1e-12);
}

TEST_CASE("view transform undoes a 90 degree rotation about z") {
  const auto s = aligned_sequence(5, 4);
  const Eigen::Matrix3d rz = Eigen::AngleAxisd(std::numbers::pi / 2, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const auto out = view_invariant_transform(transformed(s, rz, Eigen::Vector3d::Zero()));
  CHECK(testing::max_abs_diff(out.data, s.data) <= 1e-9);
}

TEST_CASE("view transform: rigid invariance, distance preservation, idempotence") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing::random_sequence(6, 1000 + trial);
    const auto base = view_invariant_transform(s);
    CHECK(max_pairwise_distance_change(s, base) <= 1e-9);

    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::Vector3d v(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    const auto moved = view_invariant_transform(transformed(s, r, v));
    CHECK(testing::max_abs_diff(moved.data, base.data) <= 1e-9);

    const auto twice = view_invariant_transform(base);
    CHECK(testing::max_abs_diff(twice.data, base.data) <= 1e-9);

    // Frame 0 axes land on +z and +x, spine at the origin in every frame.
    const Eigen::Vector3d spine_axis = at(base, 0, joint::neck) - at(base, 0, joint::spine_mid);
    CHECK(std::abs(spine_axis.normalized().z() - 1.0) <= 1e-9);
    const Eigen::Vector3d shoulders = at(base, 0, joint::shoulder_right) - at(base, 0, joint::shoulder_left);
    CHECK(std::abs(shoulders.y()) <= 1e-9);
    CHECK(shoulders.x() > 0.0);
    for (std::size_t t = 0; t < base.frames(); ++t) CHECK(at(base, t, joint::spine_mid).norm() <= 1e-12);
  }
}

TEST_CASE("view transform rejects degenerate axes") {
  auto s = testing::random_sequence(3, 5);
  for (int c = 0; c < 3; ++c) s.data(c, 0, joint::neck) = s.data(c, 0, joint::spine_mid);
  CHECK_THROWS_AS(view_invariant_transform(s), PreprocessError);
  s = testing::random_sequence(3, 5);
  for (int c = 0; c < 3; ++c) s.data(c, 0, joint::shoulder_right) = s.data(c, 0, joint::shoulder_left);
  try {
    view_invariant_transform(s);
    FAIL("expected PreprocessError");
  } catch (const PreprocessError& e) {
    CHECK(std::string(e.what()).find("ShoulderLeft") != std::string::npos);
  }
  CHECK_THROWS_AS(view_invariant_transform(testing::random_sequence(3, 5, 10)), ShapeError);
}

TEST_CASE("upper-body completion of a T-pose") {
  const auto full = complete_upper_body(upper_body_tpose());
  REQUIRE(full.joints() == 25);
  CHECK_NOTHROW(validate(full));
  const auto& topo = default_topology();

  // Lower joints sit on the -z extension of the spine.
  const Eigen::Vector3d top = at(full, 0, joint::spine_shoulder);
  for (std::size_t j : {joint::spine_mid, joint::spine_base}) {
    const Eigen::Vector3d d = at(full, 0, j) - top;
    CHECK(std::abs(d.x()) <= 1e-12);
    CHECK(std::abs(d.y()) <= 1e-12);
    CHECK(d.z() < 0.0);
  }
  // Mirrored joints are symmetric about the spine axis (the x = 0 plane here).
  for (std::size_t i = 0; i < topo.size(); ++i) {
    const auto m = topo.mirror[i];
    CHECK(std::abs(full.data(0, 0, i) + full.data(0, 0, m)) <= 1e-9);
    CHECK(std::abs(full.data(1, 0, i) - full.data(1, 0, m)) <= 1e-9);
    CHECK(std::abs(full.data(2, 0, i) - full.data(2, 0, m)) <= 1e-9);
  }
  // The ten measured joints are copied unchanged.
  const auto& idx = upper_body_joint_indices();
  const auto raw = upper_body_tpose();
  for (std::size_t k = 0; k < 10; ++k) CHECK((at(full, 0, idx[k]) - at(raw, 0, k)).norm() == 0.0);
}

TEST_CASE("completion offsets scale with the reference length") {
  // Shoulder width 0.5 m: hips sit 0.5 * hip ratio either side of SpineBase.
  const auto full = complete_upper_body(upper_body_tpose());
  const CompletionRatios r;
  const double hip = (at(full, 0, joint::hip_left) - at(full, 0, joint::spine_base)).norm();
  CHECK(hip == doctest::Approx(0.5 * r.hip).epsilon(1e-12));
  const double base = (at(full, 0, joint::spine_base) - at(full, 0, joint::spine_shoulder)).norm();
  CHECK(base == doctest::Approx(0.5 * r.spine_base).epsilon(1e-12));
  const double thigh = (at(full, 0, joint::knee_right) - at(full, 0, joint::hip_right)).norm();
  CHECK(thigh == doctest::Approx(0.5 * r.thigh).epsilon(1e-12));

  CompletionRatios custom;
  custom.hip = 0.5;
  const auto wide = complete_upper_body(upper_body_tpose(), custom);
  CHECK((at(wide, 0, joint::hip_left) - at(wide, 0, joint::spine_base)).norm() ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("completion errors") {
  CHECK_THROWS_AS(complete_upper_body(testing::random_sequence(2, 1, 9)), ShapeError);
  auto s = upper_body_tpose();
  for (int c = 0; c < 3; ++c) s.data(c, 0, 6) = s.data(c, 0, 2);
  CHECK_THROWS_AS(complete_upper_body(s), PreprocessError);
}

TEST_CASE("gaze injection fills gaps") {
  const auto s = testing::random_sequence(3, 7);
  const std::array<double, 3> g1{1, 2, 3}, g3{7, 8, 9};
  const auto head = default_topology().head_gaze_index;

  auto out = inject_gaze_joint(s, {g1, std::nullopt, g3});
  CHECK(at(out, 0, head) == Eigen::Vector3d(1, 2, 3));
  CHECK(at(out, 1, head) == Eigen::Vector3d(1, 2, 3));
  CHECK(at(out, 2, head) == Eigen::Vector3d(7, 8, 9));
  // Other joints untouched.
  for (std::size_t j = 0; j < 25; ++j) {
    if (j != head) CHECK(at(out, 1, j) == at(s, 1, j));
  }

  out = inject_gaze_joint(s, {g1, g3, g1});
  CHECK(at(out, 1, head) == Eigen::Vector3d(7, 8, 9));

  const auto s2 = testing::random_sequence(2, 8);
  out = inject_gaze_joint(s2, {std::nullopt, g3});
  CHECK(at(out, 0, head) == Eigen::Vector3d(7, 8, 9));
  CHECK(at(out, 1, head) == Eigen::Vector3d(7, 8, 9));

  CHECK_THROWS_AS(inject_gaze_joint(s2, {std::nullopt, std::nullopt}), PreprocessError);
  CHECK_THROWS_AS(inject_gaze_joint(s2, {g1}), ShapeError);
}

TEST_CASE("regularize_length repeats cyclically or truncates") {
  const auto s = testing::random_sequence(2, 9);
  const auto five = regularize_length(s, 5);
  REQUIRE(five.frames() == 5);
  const std::size_t expect[5] = {0, 1, 0, 1, 0};
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t j = 0; j < 25; ++j) CHECK(at(five, t, j) == at(s, expect[t], j));
  }
  CHECK(regularize_length(s, 2) == s);

  const auto ten = testing::random_sequence(10, 10);
  const auto four = regularize_length(ten, 4);
  REQUIRE(four.frames() == 4);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t j = 0; j < 25; ++j) CHECK(at(four, t, j) == at(ten, t, j));
  }
  CHECK_THROWS_AS(regularize_length(s, 0), ConfigError);
}

TEST_CASE("augmentations") {
  auto s = testing::random_sequence(10, 12);
  s.label = Label::ASD;
  const PreprocessConfig cfg;

  SUBCASE("flip_horizontal is an involution") {
    const auto once = augment(s, AugmentationKind::flip_horizontal, 1);
    const auto twice = augment(once, AugmentationKind::flip_horizontal, 1);
    CHECK(testing::max_abs_diff(twice.data, s.data) <= 1e-12);
    // Left hand takes the mirrored right hand with x negated.
    CHECK(once.data(0, 3, joint::hand_left) == -s.data(0, 3, joint::hand_right));
    CHECK(once.data(1, 3, joint::hand_left) == s.data(1, 3, joint::hand_right));
  }
  SUBCASE("flip_vertical negates y") {
    const auto f = augment(s, AugmentationKind::flip_vertical, 1);
    for (std::size_t j = 0; j < 25; ++j) {
      CHECK(f.data(1, 2, j) == -s.data(1, 2, j));
      CHECK(f.data(0, 2, j) == s.data(0, 2, j));
    }
  }
  SUBCASE("jitter is deterministic with small zero-mean noise") {
    const auto a = augment(s, AugmentationKind::jitter, 77);
    const auto b = augment(s, AugmentationKind::jitter, 77);
    CHECK(a == b);
    CHECK_FALSE(augment(s, AugmentationKind::jitter, 78).data == a.data);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < s.data.size(); ++i) {
      const double d = a.data.values()[i] - s.data.values()[i];
      sum += d;
      sq += d * d;
    }
    const double n = static_cast<double>(s.data.size());
    CHECK(std::abs(sum / n) < 0.003);
    CHECK(std::sqrt(sq / n) == doctest::Approx(cfg.jitter_sigma).epsilon(0.15));
  }
  SUBCASE("scale by f then 1/f") {
    const auto a = augment(s, AugmentationKind::scale, 5);
    const double f = a.data(0, 0, 0) / s.data(0, 0, 0);
    CHECK(f >= cfg.scale_min);
    CHECK(f <= cfg.scale_max);
    auto back = a;
    for (double& v : back.data.values()) v *= 1.0 / f;
    CHECK(testing::max_abs_diff(back.data, s.data) <= 1e-9);
  }
  SUBCASE("translations shift x by 0.1 m") {
    const auto l = augment(s, AugmentationKind::translate_left, 1);
    const auto r = augment(s, AugmentationKind::translate_right, 1);
    CHECK(l.data(0, 4, 7) == doctest::Approx(s.data(0, 4, 7) - 0.1).epsilon(1e-14));
    CHECK(r.data(0, 4, 7) == doctest::Approx(s.data(0, 4, 7) + 0.1).epsilon(1e-14));
    CHECK(l.data(2, 4, 7) == s.data(2, 4, 7));
  }
  SUBCASE("slice keeps an 80% window then repeats") {
    const auto sl = augment(s, AugmentationKind::slice, 9);
    REQUIRE(sl.frames() == 10);
    // Find the window start in the original.
    std::size_t start = 99;
    for (std::size_t k = 0; k + 8 <= 10; ++k) {
      if (at(sl, 0, 0) == at(s, k, 0)) start = k;
    }
    REQUIRE(start <= 2);
    for (std::size_t t = 0; t < 10; ++t) CHECK(at(sl, t, 5) == at(s, start + t % 8, 5));
  }
  SUBCASE("metadata, shape and provenance") {
    for (auto kind : kAllAugmentations) {
      const auto a = augment(s, kind, 3);
      CHECK(a.subject_id == s.subject_id);
      CHECK(a.label == s.label);
      CHECK(a.data.same_shape(s.data));
      CHECK(a.provenance.augmentation == kind);
    }
  }
}

TEST_CASE("augment_dataset gives 8 records per subject") {
  Dataset ds;
  for (int i = 0; i < 5; ++i) ds.sequences.push_back(testing::random_sequence(6, 30 + i));
  const auto aug = augment_dataset(ds, 1);
  CHECK(aug.size() == 40);
  CHECK_NOTHROW(validate(aug));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(aug.sequences[8 * i].provenance.is_original());
    std::set<AugmentationKind> kinds;
    for (std::size_t k = 1; k < 8; ++k) {
      CHECK(aug.sequences[8 * i + k].subject_id == ds.sequences[i].subject_id);
      kinds.insert(*aug.sequences[8 * i + k].provenance.augmentation);
    }
    CHECK(kinds.size() == 7);
  }
  CHECK(augment_dataset(ds, 1).sequences == aug.sequences);
}

TEST_CASE("spine centering and the standard pipeline") {
  const auto s = testing::random_sequence(7, 40);
  const auto c = center_on_spine(s);
  for (std::size_t t = 0; t < 7; ++t) {
    CHECK(at(c, t, joint::spine_mid).norm() == 0.0);
    CHECK((at(c, t, 3) - (at(s, t, 3) - at(s, t, joint::spine_mid))).norm() == 0.0);
  }

  PreprocessConfig cfg;
  cfg.target_frames = 12;
  const auto p = preprocess_sequence(s, cfg);
  CHECK(p.frames() == 12);
  CHECK(p.data == regularize_length(c, 12).data);

  cfg.apply_rotation = true;
  CHECK(preprocess_sequence(s, cfg).data == regularize_length(view_invariant_transform(s), 12).data);

  cfg.apply_rotation = false;
  cfg.center_spine = false;
  CHECK(preprocess_sequence(s, cfg).data == regularize_length(s, 12).data);

  auto dream = upper_body_tpose();
  const auto full = preprocess_sequence(dream, cfg);
  CHECK(full.joints() == 25);

  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}
