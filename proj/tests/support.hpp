#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "skelgait/rng.hpp"
#include "skelgait/skeleton.hpp"

namespace testing {

inline skelgait::Tensor3 random_tensor(std::size_t c, std::size_t t, std::size_t j,
                                       std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  skelgait::Rng rng(seed);
  skelgait::Tensor3 x(c, t, j);
  for (double& v : x.values()) v = rng.uniform(lo, hi);
  return x;
}

inline skelgait::SkeletonSequence random_sequence(std::size_t frames, std::uint64_t seed,
                                                  std::size_t joints = skelgait::kBodyJoints) {
  skelgait::SkeletonSequence s;
  s.data = random_tensor(3, frames, joints, seed);
  s.subject_id = "s" + std::to_string(seed);
  return s;
}

inline double max_abs_diff(const skelgait::Tensor3& a, const skelgait::Tensor3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("skelgait_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
