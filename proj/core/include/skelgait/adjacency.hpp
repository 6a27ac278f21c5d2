#pragma once

#include <vector>

#include <Eigen/Core>

#include "skelgait/skeleton.hpp"

namespace skelgait {

/// Binary bone adjacency: A(i, j) = 1 iff (i, j) is an edge. Symmetric, zero diagonal.
Eigen::MatrixXd build_adjacency(std::size_t joints, const std::vector<Edge>& edges);
Eigen::MatrixXd build_adjacency(const SkeletonTopology& topo);

/// Exact-distance-k adjacency with self-loops, computed from powers of A + I:
///   I + 1[(A + I)^k >= 1] - 1[(A + I)^(k-1) >= 1].
/// Entry (i, j) is 1 iff i == j or the shortest path between i and j has exactly k hops.
Eigen::MatrixXd k_adjacency(const Eigen::MatrixXd& adjacency, int k);

/// D^-1/2 A D^-1/2 with D the row sums of A. Throws ShapeError on a zero row sum.
Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency);

/// Normalized k-adjacency matrices for k = 1..k_max.
struct MultiScaleAdjacency {
  std::vector<Eigen::MatrixXd> scales;

  std::size_t k_max() const noexcept { return scales.size(); }
  std::size_t joints() const noexcept {
    return scales.empty() ? 0 : static_cast<std::size_t>(scales.front().rows());
  }
};

MultiScaleAdjacency build_multiscale_adjacency(const Eigen::MatrixXd& adjacency, int k_max);
MultiScaleAdjacency build_multiscale_adjacency(const SkeletonTopology& topo, int k_max);

}  // namespace skelgait
