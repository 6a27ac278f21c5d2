#include "skelgait/svr.hpp"

#include <cmath>
#include <numeric>

#include "skelgait/errors.hpp"
#include "skelgait/rng.hpp"

namespace skelgait {

void validate(const SvrConfig& cfg) {
  if (!(cfg.epsilon >= 0.0)) throw ConfigError("svr: epsilon must be >= 0");
  if (!(cfg.C > 0.0)) throw ConfigError("svr: C must be > 0");
  if (cfg.epochs == 0) throw ConfigError("svr: epochs must be positive");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("svr: learning_rate must be > 0");
}

double svr_predict(const SvrModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.weights.size()) {
    throw ShapeError("svr_predict: model has dimension " + std::to_string(model.weights.size()) +
                     ", feature has " + std::to_string(x.size()));
  }
  return model.weights.dot(x) + model.bias;
}

double svr_objective(const SvrModel& model, const std::vector<Eigen::VectorXd>& features,
                     const std::vector<double>& targets) {
  double loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    loss += std::max(0.0, std::abs(svr_predict(model, features[i]) - targets[i]) - model.epsilon);
  }
  return 0.5 * model.weights.squaredNorm() + model.C * loss;
}

SvrFit svr_fit(const std::vector<Eigen::VectorXd>& features, const std::vector<double>& targets,
               const SvrConfig& cfg) {
  validate(cfg);
  if (features.size() != targets.size()) {
    throw ShapeError("svr_fit: " + std::to_string(features.size()) + " feature vectors but " +
                     std::to_string(targets.size()) + " targets");
  }
  if (features.size() < 2) throw ValidationError("svr_fit: needs at least 2 samples");
  const auto dim = features.front().size();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) {
      throw ShapeError("svr_fit: feature " + std::to_string(i) + " has dimension " +
                       std::to_string(features[i].size()) + ", expected " + std::to_string(dim));
    }
  }

  const std::size_t n = features.size();
  SvrModel current;
  current.weights = Eigen::VectorXd::Zero(dim);
  current.epsilon = cfg.epsilon;
  current.C = cfg.C;
  SvrFit fit{current, {}};
  double best = svr_objective(current, features, targets);

  // Per-sample subgradient of J / (C n): w / (C n) + sign(r) x when |r| > epsilon.
  const double reg = 1.0 / (cfg.C * static_cast<double>(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    const double step = cfg.learning_rate / std::sqrt(1.0 + static_cast<double>(epoch));
    for (std::size_t i : order) {
      const double r = current.weights.dot(features[i]) + current.bias - targets[i];
      current.weights *= 1.0 - step * reg;
      if (std::abs(r) > cfg.epsilon) {
        const double s = r > 0.0 ? 1.0 : -1.0;
        current.weights -= step * s * features[i];
        current.bias -= step * s;
      }
    }
    const double obj = svr_objective(current, features, targets);
    if (obj < best) {
      best = obj;
      fit.model = current;
    }
    fit.objective_history.push_back(best);
  }
  return fit;
}

}  // namespace skelgait
