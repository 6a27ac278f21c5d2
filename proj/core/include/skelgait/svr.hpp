#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace skelgait {

/// Linear epsilon-insensitive support vector regression.
struct SvrModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double epsilon = 0.5;
  double C = 1.0;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(weights.size()); }
};

struct SvrConfig {
  double epsilon = 0.5;
  double C = 1.0;
  std::size_t epochs = 500;
  /// Initial step; epoch e uses learning_rate / sqrt(1 + e).
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

void validate(const SvrConfig& cfg);

struct SvrFit {
  SvrModel model;
  /// Primal objective of the best iterate seen after each epoch.
  std::vector<double> objective_history;
};

/// 0.5 |w|^2 + C * sum max(0, |w.x + b - y| - epsilon).
double svr_objective(const SvrModel& model, const std::vector<Eigen::VectorXd>& features,
                     const std::vector<double>& targets);

/// Stochastic subgradient descent on the primal objective scaled by 1 / (C n), visiting
/// samples in a seeded order each epoch. Starts from the zero model and returns the iterate
/// with the lowest objective, so the result never scores worse than w = 0, b = 0.
/// Throws ShapeError on length or dimension mismatch, ValidationError for fewer than 2 samples.
SvrFit svr_fit(const std::vector<Eigen::VectorXd>& features, const std::vector<double>& targets,
               const SvrConfig& cfg = {});

double svr_predict(const SvrModel& model, const Eigen::VectorXd& x);

}  // namespace skelgait
