#include "skelgait/adjacency.hpp"

#include <cmath>
#include <string>

namespace skelgait {

Eigen::MatrixXd build_adjacency(std::size_t joints, const std::vector<Edge>& edges) {
  const auto n = static_cast<Eigen::Index>(joints);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : edges) {
    if (i >= joints || j >= joints) throw ShapeError("build_adjacency: edge index out of range");
    if (i == j) continue;
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return a;
}

Eigen::MatrixXd build_adjacency(const SkeletonTopology& topo) {
  return build_adjacency(topo.size(), topo.edges);
}

namespace {

// Reachability indicator of (A + I)^power, kept binary after every product.
Eigen::MatrixXd reach_within(const Eigen::MatrixXd& looped, int power) {
  const Eigen::Index n = looped.rows();
  Eigen::MatrixXd reach = Eigen::MatrixXd::Identity(n, n);
  for (int p = 0; p < power; ++p) {
    reach = (reach * looped).unaryExpr([](double v) { return v >= 1.0 ? 1.0 : 0.0; });
  }
  return reach;
}

}  // namespace

Eigen::MatrixXd k_adjacency(const Eigen::MatrixXd& adjacency, int k) {
  if (k < 1) throw ConfigError("k_adjacency: k must be >= 1, got " + std::to_string(k));
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("k_adjacency: matrix is not square");
  const Eigen::Index n = adjacency.rows();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd looped =
      (adjacency + identity).unaryExpr([](double v) { return v != 0.0 ? 1.0 : 0.0; });
  return identity + reach_within(looped, k) - reach_within(looped, k - 1);
}

Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ShapeError("normalize_adjacency: matrix is not square");
  }
  const Eigen::VectorXd degree = adjacency.rowwise().sum();
  for (Eigen::Index i = 0; i < degree.size(); ++i) {
    if (!(degree[i] > 0.0)) {
      throw ShapeError("normalize_adjacency: row " + std::to_string(i) + " has zero degree");
    }
  }
  const Eigen::Index n = adjacency.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = adjacency(i, j) / std::sqrt(degree[i] * degree[j]);
    }
  }
  return out;
}

MultiScaleAdjacency build_multiscale_adjacency(const Eigen::MatrixXd& adjacency, int k_max) {
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  MultiScaleAdjacency msa;
  for (int k = 1; k <= k_max; ++k) msa.scales.push_back(normalize_adjacency(k_adjacency(adjacency, k)));
  return msa;
}

MultiScaleAdjacency build_multiscale_adjacency(const SkeletonTopology& topo, int k_max) {
  return build_multiscale_adjacency(build_adjacency(topo), k_max);
}

}  // namespace skelgait
