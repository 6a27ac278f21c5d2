#pragma once

#include <Eigen/Core>

#include "skelgait/skeleton.hpp"

namespace skelgait {

/// Pairwise joint cosine matrix (J x J, symmetric).
struct AngleMatrix {
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

/// Divides every (channel, joint) trajectory by its L2 norm over frames.
/// Norms below epsilon are floored at epsilon, so all-zero trajectories stay zero.
Tensor3 normalize_over_frames(const Tensor3& x, double epsilon = 1e-8);

/// Entry (i, j) is the channel mean of the frame dot products of the normalized
/// trajectories of joints i and j. Diagonal entries are 1 for non-degenerate joints.
AngleMatrix angle_matrix(const Tensor3& normalized);

/// out[c, t, i] = sum_j x[c, t, j] * am[j, i]. Metadata is carried over.
SkeletonSequence embed_angles(const SkeletonSequence& seq, const AngleMatrix& am);
Tensor3 embed_angles(const Tensor3& x, const AngleMatrix& am);

/// The per-sequence matrix, computed from the normalized stream and applied to the raw stream.
AngleMatrix sequence_angle_matrix(const SkeletonSequence& seq, double epsilon = 1e-8);
SkeletonSequence angle_pipeline(const SkeletonSequence& seq, double epsilon = 1e-8);

}  // namespace skelgait
