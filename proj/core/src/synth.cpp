#include "skelgait/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Geometry>

#include "skelgait/errors.hpp"
#include "skelgait/rng.hpp"

namespace skelgait {

void validate(const SynthConfig& cfg) {
  if (!(cfg.asymmetry_ratio > 0.0)) throw ConfigError("synth: asymmetry_ratio must be > 0");
  if (!(cfg.speed_ratio > 0.0)) throw ConfigError("synth: speed_ratio must be > 0");
  if (!(cfg.noise_sigma >= 0.0)) throw ConfigError("synth: noise_sigma must be >= 0");
  if (!std::isfinite(cfg.slant_deg)) throw ConfigError("synth: slant_deg must be finite");
  if (cfg.frames == 0) throw ConfigError("synth: frames must be positive");
  if (!(cfg.frame_rate > 0.0)) throw ConfigError("synth: frame_rate must be > 0");
}

namespace {

using V3 = Eigen::Vector3d;

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

Eigen::Matrix3d rot_x(double a) { return Eigen::AngleAxisd(a, V3::UnitX()).toRotationMatrix(); }
Eigen::Matrix3d rot_y(double a) { return Eigen::AngleAxisd(a, V3::UnitY()).toRotationMatrix(); }

struct Subject {
  double height = 1.0;
  double period = 34.0;     // frames per stride at speed 1
  double velocity = 1.0;    // m/s at speed 1
  double phase = 0.0;
  double leg_amp = radians(25.0);
  double arm_amp = radians(20.0);
  double knee_flex = radians(30.0);
  double start_y = 0.0;
  // Injected effects.
  double slant = 0.0;
  double left_amp = 1.0;
  double speed = 1.0;
};

// Rest pose of a child about 1 m tall; +x is the subject's left.
struct Limb {
  V3 root, mid, end, tip, extra;
};

Limb left_arm() {
  return {{0.13, 0, 0.86}, {0.15, 0, 0.68}, {0.16, 0, 0.52}, {0.16, 0, 0.47}, {0.16, 0, 0.42}};
}
Limb left_leg() {
  return {{0.07, 0, 0.53}, {0.07, 0, 0.30}, {0.07, 0, 0.06}, {0.07, 0.08, 0.02}, {}};
}
V3 mirror(const V3& v) { return {-v.x(), v.y(), v.z()}; }

void pose_frame(const Subject& s, double t, double fr, Tensor3& out, std::size_t frame) {
  std::array<V3, kBodyJoints> p;
  p[joint::spine_base] = {0, 0, 0.55};
  p[joint::spine_mid] = {0, 0, 0.70};
  p[joint::spine_shoulder] = {0, 0, 0.88};
  p[joint::neck] = {0, 0, 0.93};
  p[joint::head] = {0, 0, 1.03};

  const double phi = 2.0 * std::numbers::pi * t * s.speed / s.period + s.phase;
  const double swing = std::sin(phi);
  const double flex = 0.5 * (1.0 - std::cos(phi));

  for (int side = 0; side < 2; ++side) {
    const bool left = side == 0;
    const double amp = left ? s.left_amp : 1.0;
    const double sign = left ? 1.0 : -1.0;
    // Abduction turns a hanging limb toward its own side.
    const Eigen::Matrix3d abduct = rot_y(-sign * s.slant);
    auto place = [&](const V3& v) -> V3 { return left ? v : mirror(v); };

    Limb leg = left_leg();
    const V3 hip = place(leg.root);
    const double leg_angle = sign * amp * s.leg_amp * swing;
    const Eigen::Matrix3d thigh = abduct * rot_x(leg_angle);
    const double knee_angle = leg_angle - amp * s.knee_flex * (left ? flex : 1.0 - flex);
    const Eigen::Matrix3d shank = abduct * rot_x(knee_angle);
    const V3 knee = hip + thigh * (place(leg.mid) - hip);
    const V3 ankle = knee + shank * (place(leg.end) - place(leg.mid));
    const V3 foot = ankle + shank * (place(leg.tip) - place(leg.end));

    Limb arm = left_arm();
    const V3 shoulder = place(arm.root);
    const Eigen::Matrix3d upper = abduct * rot_x(-sign * amp * s.arm_amp * swing);
    auto arm_point = [&](const V3& v) -> V3 { return shoulder + upper * (place(v) - shoulder); };

    if (left) {
      p[joint::hip_left] = hip;
      p[joint::knee_left] = knee;
      p[joint::ankle_left] = ankle;
      p[joint::foot_left] = foot;
      p[joint::shoulder_left] = shoulder;
      p[joint::elbow_left] = arm_point(arm.mid);
      p[joint::wrist_left] = arm_point(arm.end);
      p[joint::hand_left] = arm_point(arm.tip);
      p[joint::hand_tip_left] = arm_point(arm.extra);
      p[joint::thumb_left] = arm_point({0.16, 0.03, 0.46});
    } else {
      p[joint::hip_right] = hip;
      p[joint::knee_right] = knee;
      p[joint::ankle_right] = ankle;
      p[joint::foot_right] = foot;
      p[joint::shoulder_right] = shoulder;
      p[joint::elbow_right] = arm_point(arm.mid);
      p[joint::wrist_right] = arm_point(arm.end);
      p[joint::hand_right] = arm_point(arm.tip);
      p[joint::hand_tip_right] = arm_point(arm.extra);
      p[joint::thumb_right] = arm_point({0.16, 0.03, 0.46});
    }
  }

  // Forward lean of the trunk and everything attached above it.
  const V3 pivot = p[joint::spine_base];
  const Eigen::Matrix3d lean = rot_x(-s.slant);
  for (std::size_t j : {joint::spine_mid, joint::spine_shoulder, joint::neck, joint::head,
                        joint::shoulder_left, joint::elbow_left, joint::wrist_left,
                        joint::hand_left, joint::hand_tip_left, joint::thumb_left,
                        joint::shoulder_right, joint::elbow_right, joint::wrist_right,
                        joint::hand_right, joint::hand_tip_right, joint::thumb_right}) {
    p[j] = pivot + lean * (p[j] - pivot);
  }

  const double y = s.start_y + s.velocity * s.speed * t / fr;
  const double bob = 0.01 * std::cos(2.0 * phi);
  for (std::size_t j = 0; j < kBodyJoints; ++j) {
    const V3 q = s.height * p[j] + V3(0, y, bob);
    for (int c = 0; c < 3; ++c) out(static_cast<std::size_t>(c), frame, j) = q[c];
  }
}

std::string subject_name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03zu", prefix, i);
  return buf;
}

}  // namespace

Dataset synthesize(const SynthConfig& cfg) {
  validate(cfg);
  Dataset ds;
  const std::size_t total = cfg.n_td + cfg.n_asd;
  for (std::size_t i = 0; i < total; ++i) {
    const bool asd = i >= cfg.n_td;
    Rng rng(derive_seed(cfg.seed, i));
    Subject s;
    s.height = rng.uniform(0.9, 1.1);
    s.period = rng.uniform(30.0, 38.0);
    s.velocity = rng.uniform(0.9, 1.1);
    s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    s.leg_amp = radians(rng.uniform(20.0, 30.0));
    s.arm_amp = radians(rng.uniform(15.0, 25.0));
    s.knee_flex = radians(rng.uniform(25.0, 35.0));
    s.start_y = rng.uniform(-0.2, 0.2);
    const double draw = rng.uniform();
    const double severity = asd ? draw : 0.0;
    if (asd) {
      const double m = 0.75 + 0.5 * severity;
      s.slant = radians(cfg.slant_deg * m);
      s.left_amp = 1.0 + (cfg.asymmetry_ratio - 1.0) * m;
      s.speed = 1.0 + (cfg.speed_ratio - 1.0) * m;
    }

    SkeletonSequence seq;
    seq.data = Tensor3(kCoordinateChannels, cfg.frames, kBodyJoints);
    for (std::size_t t = 0; t < cfg.frames; ++t) {
      pose_frame(s, static_cast<double>(t), cfg.frame_rate, seq.data, t);
    }
    if (cfg.noise_sigma > 0.0) {
      for (double& v : seq.data.values()) v += rng.normal(0.0, cfg.noise_sigma);
    }
    seq.subject_id = asd ? subject_name("asd", i - cfg.n_td) : subject_name("td", i);
    seq.frame_rate = cfg.frame_rate;
    seq.label = asd ? Label::ASD : Label::TD;
    AdosRecord ados;
    ados.score = asd ? 7 + static_cast<int>(std::lround(13.0 * severity))
                     : static_cast<int>(rng.below(7));
    ados.module_id = 1 + static_cast<int>(rng.below(2));
    ados.age_years = 3 + static_cast<int>(rng.below(4));
    seq.ados = ados;
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

}  // namespace skelgait
