#pragma once

#include <cstdint>

#include "skelgait/skeleton.hpp"

namespace skelgait {

/// Procedural walking children on the 25-joint topology (z up, walking along +y).
///
/// ASD-like subjects draw a severity s in [0, 1]; every injected effect is scaled by
/// 0.75 + 0.5 s around the configured value, so neutral settings stay neutral:
///  - slant_deg: forward trunk lean about SpineBase plus outward abduction of the arms
///    (about the shoulders) and legs (about the hips), each by the scaled angle;
///  - asymmetry_ratio: multiplies the left arm and leg swing amplitude;
///  - speed_ratio: multiplies walking speed and stride frequency.
struct SynthConfig {
  std::size_t n_td = 40;
  std::size_t n_asd = 40;
  double slant_deg = 15.0;
  double asymmetry_ratio = 1.5;
  double speed_ratio = 0.7;
  double noise_sigma = 0.005;
  std::size_t frames = 40;
  double frame_rate = 30.0;
  std::uint64_t seed = 0;
};

/// Throws ConfigError for non-positive ratios, negative noise or zero frames.
void validate(const SynthConfig& cfg);

/// TD subjects td_000.. first, then ASD subjects asd_000..; one original record each with an
/// ADOS record (TD scores 0-6, ASD scores 7 + round(13 s)). Deterministic given the seed.
Dataset synthesize(const SynthConfig& cfg);

}  // namespace skelgait
