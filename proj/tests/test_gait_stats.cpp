#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skelgait/errors.hpp"
#include "skelgait/gait_stats.hpp"
#include "skelgait/preprocess.hpp"
#include "skelgait/rng.hpp"
#include "skelgait/synth.hpp"
#include "support.hpp"

using namespace skelgait;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SkeletonSequence static_sequence(std::size_t frames) {
  SkeletonSequence s;
  s.data = Tensor3(3, frames, kBodyJoints);
  return s;
}

void set_joint(SkeletonSequence& s, std::size_t t, std::size_t j, double x, double y, double z) {
  s.data(0, t, j) = x;
  s.data(1, t, j) = y;
  s.data(2, t, j) = z;
}

// Rotation by `deg` about the y axis through the origin (z toward +x).
SkeletonSequence roll_about_y(const SkeletonSequence& s, double deg) {
  auto out = s;
  const double c = std::cos(deg * kDeg), sn = std::sin(deg * kDeg);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    for (std::size_t j = 0; j < s.joints(); ++j) {
      const double x = s.data(0, t, j), z = s.data(2, t, j);
      out.data(0, t, j) = c * x + sn * z;
      out.data(2, t, j) = -sn * x + c * z;
    }
  }
  return out;
}

// Mirror-symmetric skeleton whose arm joints swing along y with the given amplitudes.
SkeletonSequence swinging(std::size_t frames, double left_amp, double right_amp, bool legs_too) {
  const auto& topo = default_topology();
  auto s = static_sequence(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const double phase = std::sin(0.4 * static_cast<double>(t));
    for (std::size_t p = 0; p < topo.left_group.size(); ++p) {
      const bool arm = p < 5;
      const double base_x = 0.1 + 0.02 * static_cast<double>(p);
      const double base_z = arm ? 0.2 - 0.05 * static_cast<double>(p) : -0.3 - 0.1 * static_cast<double>(p);
      const double move = arm || legs_too ? phase : 0.0;
      set_joint(s, t, topo.left_group[p], base_x, left_amp * move, base_z);
      set_joint(s, t, topo.right_group[p], -base_x, right_amp * move, base_z);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("joint_spine_angles examples") {
  const auto& topo = default_topology();
  auto s = static_sequence(2);
  for (std::size_t t = 0; t < 2; ++t) {
    set_joint(s, t, topo.neck_index, 0, 0, 0.3);
    set_joint(s, t, joint::shoulder_left, 0.2, 0, 0);
    set_joint(s, t, joint::head, 0, 0.1, 0.1);
  }
  const auto a = joint_spine_angles(s);
  REQUIRE(a.per_frame.size() == 2);
  CHECK(*a.mean[topo.neck_index] == 0.0);
  CHECK(*a.mean[joint::shoulder_left] == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(*a.mean[joint::head] == doctest::Approx(45.0).epsilon(1e-12));
  CHECK_FALSE(a.mean[topo.spine_index].has_value());
  // Joints sitting on the spine are skipped every frame and marked missing.
  CHECK_FALSE(a.mean[joint::knee_left].has_value());
  CHECK_FALSE(a.per_frame[0][joint::knee_left].has_value());

  SUBCASE("line and ray conventions") {
    auto down = static_sequence(1);
    set_joint(down, 0, joint::ankle_left, 0, 0, -0.5);
    set_joint(down, 0, joint::hip_left, 0.1, 0, -0.1);
    const auto line = joint_spine_angles(down);
    AngleOptions ray_opts;
    ray_opts.convention = AngleConvention::ray;
    const auto ray = joint_spine_angles(down, topo, ray_opts);
    CHECK(*line.mean[joint::ankle_left] == 0.0);
    CHECK(*ray.mean[joint::ankle_left] == 180.0);
    CHECK(*line.mean[joint::hip_left] == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(*ray.mean[joint::hip_left] == doctest::Approx(135.0).epsilon(1e-12));
  }
  SUBCASE("spine axis reference") {
    auto leaning = static_sequence(1);
    set_joint(leaning, 0, topo.neck_index, 0.3, 0, 0);
    set_joint(leaning, 0, joint::head, 0.5, 0, 0);
    set_joint(leaning, 0, joint::hip_left, 0, 0, -0.2);
    AngleOptions opts;
    opts.reference = AngleReference::spine_axis;
    const auto a2 = joint_spine_angles(leaning, topo, opts);
    CHECK(*a2.mean[joint::head] == 0.0);
    CHECK(*a2.mean[joint::hip_left] == doctest::Approx(90.0).epsilon(1e-12));
    // A degenerate spine axis skips the frame.
    auto flat = static_sequence(1);
    set_joint(flat, 0, joint::head, 0, 0, 1);
    CHECK_FALSE(joint_spine_angles(flat, topo, opts).mean[joint::head].has_value());
  }
  CHECK_THROWS_AS(joint_spine_angles(testing::random_sequence(3, 1, 10)), ShapeError);
}

TEST_CASE("a 15 degree tilt shifts rigid-limb angles by 15 degrees") {
  Rng rng(15);
  auto s = static_sequence(5);
  std::vector<double> theta(kBodyJoints);
  for (std::size_t j = 0; j < kBodyJoints; ++j) {
    theta[j] = rng.uniform(5.0, 70.0);
    const double len = rng.uniform(0.1, 0.6);
    for (std::size_t t = 0; t < 5; ++t) {
      if (j != default_topology().spine_index) {
        set_joint(s, t, j, len * std::sin(theta[j] * kDeg), 0.0, len * std::cos(theta[j] * kDeg));
      }
    }
  }
  const auto before = joint_spine_angles(s).mean;
  const auto after = joint_spine_angles(roll_about_y(s, 15.0)).mean;
  for (std::size_t j = 0; j < kBodyJoints; ++j) {
    if (j == default_topology().spine_index) continue;
    CHECK(*before[j] == doctest::Approx(theta[j]).epsilon(1e-9));
    CHECK(std::abs(*after[j] - *before[j] - 15.0) <= 0.5);
  }
}

TEST_CASE("motion_profile examples") {
  CHECK(motion_profile(static_sequence(4)) == std::vector<double>(kBodyJoints, 0.0));

  auto moving = static_sequence(6);
  for (std::size_t t = 0; t < 6; ++t) set_joint(moving, t, 3, 0.02 * static_cast<double>(t), 0, 0);
  CHECK(motion_profile(moving)[3] == doctest::Approx(0.02).epsilon(1e-12));

  SUBCASE("duplicating every frame keeps the path length and spreads it over 2T - 1 steps") {
    const auto s = testing::random_sequence(30, 6);
    SkeletonSequence doubled;
    doubled.data = Tensor3(3, 60, kBodyJoints);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t t = 0; t < 60; ++t) {
        for (std::size_t j = 0; j < kBodyJoints; ++j) doubled.data(c, t, j) = s.data(c, t / 2, j);
      }
    }
    const auto m = motion_profile(s);
    const auto md = motion_profile(doubled);
    for (std::size_t j = 0; j < kBodyJoints; ++j) {
      CHECK(md[j] == doctest::Approx(m[j] * 29.0 / 59.0).epsilon(1e-12));
      CHECK(std::abs(md[j] / m[j] - 0.5) < 0.01);
    }
  }
  CHECK_THROWS_AS(motion_profile(static_sequence(1)), ShapeError);
}

TEST_CASE("asymmetry") {
  SUBCASE("mirror-symmetric gait reads zero") {
    const auto a = asymmetry(swinging(20, 0.1, 0.1, true));
    CHECK(a.angle < 1e-9);
    CHECK(a.motion < 1e-9);
    CHECK(a.distance < 1e-9);
  }
  SUBCASE("left limbs moving 1.5 times as far") {
    const auto s = swinging(20, 0.15, 0.1, true);
    const auto r = gait_report(s);
    double right = 0.0;
    for (const auto& p : r.pairs) right += p.right_motion;
    right /= static_cast<double>(r.pairs.size());
    CHECK(r.asymmetry.motion == doctest::Approx(0.5 * right).epsilon(0.1));
  }
  SUBCASE("left arm only: 5 of the 8 pairs differ") {
    const auto s = swinging(20, 0.15, 0.1, false);
    const auto r = gait_report(s);
    double right_arm = 0.0;
    for (std::size_t p = 0; p < 5; ++p) right_arm += r.pairs[p].right_motion;
    right_arm /= 5.0;
    CHECK(r.asymmetry.motion == doctest::Approx(0.5 * right_arm * 5.0 / 8.0).epsilon(0.1));
  }
  SUBCASE("horizontal flip leaves the indices unchanged") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = testing::random_sequence(8, 300 + seed);
      const auto a = asymmetry(s);
      const auto b = asymmetry(augment(s, AugmentationKind::flip_horizontal, 0));
      CHECK(b.angle == doctest::Approx(a.angle).epsilon(1e-12));
      CHECK(b.motion == doctest::Approx(a.motion).epsilon(1e-12));
      CHECK(b.distance == doctest::Approx(a.distance).epsilon(1e-12));
    }
  }
  SUBCASE("no measurable pairs gives a NaN angle index") {
    const auto a = asymmetry(static_sequence(3));
    CHECK(std::isnan(a.angle));
    CHECK(a.motion == 0.0);
  }
}

TEST_CASE("report invariants on random sequences") {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = testing::random_sequence(2 + seed % 9, 900 + seed);
    const auto r = gait_report(s);
    for (const auto& a : r.per_joint_mean_angle) {
      if (a) CHECK((*a >= 0.0 && *a <= 180.0));
    }
    for (double m : r.mean_motion) CHECK(m >= 0.0);
    for (double d : r.mean_spine_distance) CHECK(d >= 0.0);
    CHECK(r.asymmetry.motion >= 0.0);
    CHECK(r.asymmetry.distance >= 0.0);
    CHECK(r.pairs.size() == 8);

    auto scaled = s;
    auto shifted = s;
    const double k = rng.uniform(0.1, 10.0);
    for (std::size_t c = 0; c < 3; ++c) {
      const double offset = rng.uniform(-5.0, 5.0);
      for (std::size_t t = 0; t < s.frames(); ++t) {
        for (std::size_t j = 0; j < kBodyJoints; ++j) {
          scaled.data(c, t, j) *= k;
          shifted.data(c, t, j) += offset;
        }
      }
    }
    const auto rs = gait_report(scaled);
    for (std::size_t j = 0; j < kBodyJoints; ++j) {
      if (r.per_joint_mean_angle[j]) {
        CHECK(std::abs(*rs.per_joint_mean_angle[j] - *r.per_joint_mean_angle[j]) <= 1e-9);
      }
    }
    const auto m0 = motion_profile(s);
    const auto m1 = motion_profile(shifted);
    for (std::size_t j = 0; j < kBodyJoints; ++j) CHECK(std::abs(m0[j] - m1[j]) <= 1e-9);
  }
}

TEST_CASE("five_number_summary") {
  const auto s = five_number_summary({4.0, 1.0, 3.0, 2.0, 5.0});
  CHECK(s == FiveNumberSummary{1.0, 2.0, 3.0, 4.0, 5.0});
  // Linear interpolation between order statistics.
  const auto e = five_number_summary({1.0, 2.0, 3.0, 4.0});
  CHECK(e.q1 == 1.75);
  CHECK(e.median == 2.5);
  CHECK(e.q3 == 3.25);
  CHECK(e.iqr() == 1.5);
  CHECK(five_number_summary({7.0}) == FiveNumberSummary{7.0, 7.0, 7.0, 7.0, 7.0});
  CHECK_THROWS_AS(five_number_summary({}), ValidationError);
}

TEST_CASE("population_summary") {
  std::vector<SkeletonSequence> group;
  for (std::uint64_t i = 0; i < 6; ++i) group.push_back(testing::random_sequence(5, 40 + i));

  SUBCASE("identical groups") {
    const auto p = population_summary(group, group, "a", "b");
    REQUIRE(p.rows.size() == kSummaryMetrics.size());
    for (std::size_t k = 0; k < p.rows.size(); ++k) {
      CHECK(p.first.metrics[k] == p.second.metrics[k]);
      CHECK(p.rows[k].higher_median == "equal");
      CHECK(p.rows[k].metric == kSummaryMetrics[k]);
    }
  }
  SUBCASE("single sample") {
    const std::vector<SkeletonSequence> one{group[0]};
    const auto p = population_summary(one, group, "one", "all");
    const auto m = sample_metrics(gait_report(group[0]));
    CHECK(p.first.samples == 1);
    for (std::size_t k = 0; k < m.size(); ++k) {
      CHECK(p.first.metrics[k] == FiveNumberSummary{m[k], m[k], m[k], m[k], m[k]});
    }
  }
  SUBCASE("medians do not depend on sample order") {
    auto shuffled = group;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[1], shuffled[4]);
    const auto a = summarize_group(group, "g");
    const auto b = summarize_group(shuffled, "g");
    for (std::size_t k = 0; k < a.metrics.size(); ++k) CHECK(a.metrics[k] == b.metrics[k]);
  }
  SUBCASE("empty group") {
    CHECK_THROWS_AS(population_summary({}, group, "none", "all"), ValidationError);
    CHECK_THROWS_AS(population_summary(group, {}, "all", "none"), ValidationError);
  }
  SUBCASE("slanted synthetic children have the higher median joint angle") {
    SynthConfig cfg;
    cfg.n_td = 20;
    cfg.n_asd = 20;
    cfg.seed = 4;
    const auto ds = preprocess_dataset(synthesize(cfg), PreprocessConfig{});
    const auto p = population_summary(ds);
    CHECK(p.first.name == "TD");
    CHECK(p.second.name == "ASD");
    CHECK(p.rows[0].higher_median == "ASD");
    CHECK(p.rows[0].second_median - p.rows[0].first_median > 5.0);
    CHECK(p.rows[3].higher_median == "ASD");
  }
}
