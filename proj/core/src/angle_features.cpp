#include "skelgait/angle_features.hpp"

#include <cmath>

namespace skelgait {

Tensor3 normalize_over_frames(const Tensor3& x, double epsilon) {
  Tensor3 out(x.channels(), x.frames(), x.joints());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t j = 0; j < x.joints(); ++j) {
      double sq = 0.0;
      for (std::size_t t = 0; t < x.frames(); ++t) sq += x(c, t, j) * x(c, t, j);
      const double norm = std::max(std::sqrt(sq), epsilon);
      for (std::size_t t = 0; t < x.frames(); ++t) out(c, t, j) = x(c, t, j) / norm;
    }
  }
  return out;
}

AngleMatrix angle_matrix(const Tensor3& normalized) {
  const std::size_t joints = normalized.joints();
  const auto n = static_cast<Eigen::Index>(joints);
  AngleMatrix am{Eigen::MatrixXd::Zero(n, n)};
  if (normalized.channels() == 0) return am;
  const double inv_channels = 1.0 / static_cast<double>(normalized.channels());
  for (std::size_t i = 0; i < joints; ++i) {
    for (std::size_t j = i; j < joints; ++j) {
      double total = 0.0;
      for (std::size_t c = 0; c < normalized.channels(); ++c) {
        double dot = 0.0;
        for (std::size_t t = 0; t < normalized.frames(); ++t) {
          dot += normalized(c, t, i) * normalized(c, t, j);
        }
        total += dot;
      }
      const double v = total * inv_channels;
      am.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      am.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return am;
}

Tensor3 embed_angles(const Tensor3& x, const AngleMatrix& am) {
  const std::size_t joints = x.joints();
  if (am.values.rows() != am.values.cols() || am.size() != joints) {
    throw ShapeError("embed_angles: angle matrix is " + std::to_string(am.values.rows()) + "x" +
                     std::to_string(am.values.cols()) + " for " + std::to_string(joints) +
                     " joints");
  }
  Tensor3 out(x.channels(), x.frames(), joints);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t t = 0; t < x.frames(); ++t) {
      for (std::size_t i = 0; i < joints; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < joints; ++j) acc += x(c, t, j) * am(j, i);
        out(c, t, i) = acc;
      }
    }
  }
  return out;
}

SkeletonSequence embed_angles(const SkeletonSequence& seq, const AngleMatrix& am) {
  SkeletonSequence out = seq;
  out.data = embed_angles(seq.data, am);
  return out;
}

AngleMatrix sequence_angle_matrix(const SkeletonSequence& seq, double epsilon) {
  return angle_matrix(normalize_over_frames(seq.data, epsilon));
}

SkeletonSequence angle_pipeline(const SkeletonSequence& seq, double epsilon) {
  return embed_angles(seq, sequence_angle_matrix(seq, epsilon));
}

}  // namespace skelgait
