#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "skelgait/adjacency.hpp"
#include "skelgait/graph_layers.hpp"
#include "skelgait/skepxel.hpp"

namespace skelgait {

/// Co-learning branch: Skepxel image construction plus the patch encoder width.
struct CoLearningConfig {
  SkepxelConfig image;
  std::size_t patch_size = kSkepxelSide;
  std::size_t embed_dim = 16;
};

struct NetworkConfig {
  int k_max = 2;
  /// Output channels of each GCN -> TCN block; its length is the block count.
  std::vector<std::size_t> channels = {16, 16};
  std::size_t tcn_window = 3;
  double learning_rate = 0.05;
  std::size_t epochs = 200;
  /// 0 means full-batch.
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  double lambda_distance = 1.0;
  /// Feed the network the angle-embedded stream instead of raw coordinates.
  bool angle_embedding = true;
  double epsilon = 1e-8;
  std::optional<CoLearningConfig> co_learning;

  std::size_t blocks() const noexcept { return channels.size(); }
};

void validate(const NetworkConfig& cfg);

/// Block stack: ReLU(TCN(GCN(x))) repeated, global average pooling over frames and
/// joints, then a linear head producing two logits (index 0 = TD, 1 = ASD).
struct Network {
  NetworkConfig config;
  MultiScaleAdjacency adjacency;
  std::vector<GcnLayer> gcn;
  std::vector<TcnLayer> tcn;
  ParamMatrix head_weights;  ///< embedding_dim x 2
  Eigen::VectorXd head_bias;     ///< 2
  std::optional<PatchEncoder> encoder;
  bool trained = false;

  std::size_t input_channels() const noexcept;
  std::size_t embedding_dim() const noexcept { return static_cast<std::size_t>(head_weights.rows()); }
  std::size_t parameter_count() const;

  /// Visits every parameter array in a fixed order with a stable name and shape.
  void for_each_parameter(
      const std::function<void(const std::string&, std::vector<std::size_t>, std::span<double>)>& f);
  void for_each_parameter(const std::function<void(const std::string&, std::vector<std::size_t>,
                                                   std::span<const double>)>& f) const;

  std::vector<double> flat_parameters() const;
  void assign_parameters(std::span<const double> flat);
};

/// Freshly initialized network; weights uniform in +-1/sqrt(fan_in), biases zero.
Network make_network(const NetworkConfig& cfg, const SkeletonTopology& topo = default_topology(),
                     std::size_t input_channels = kCoordinateChannels);

/// Same shapes, every parameter zero.
Network zeros_like(const Network& net);

struct ForwardResult {
  Eigen::Vector2d logits;
  Eigen::VectorXd embedding;
  /// Smallest nonzero |pre-activation| over every ReLU. Finite differences with a step much smaller
  /// than this (times the parameter's influence) never cross a kink.
  double relu_margin = 0.0;
};

ForwardResult forward_network(const Network& net, const Tensor3& input);

/// The tensor the network consumes for a sequence (angle-embedded when configured).
Tensor3 network_input(const SkeletonSequence& seq, const NetworkConfig& cfg);

std::size_t label_index(Label label);
Label label_from_index(std::size_t index);

struct SampleLoss {
  double total = 0.0;
  double cross_entropy = 0.0;
  double distance = 0.0;
};

/// Cross-entropy, plus lambda * ||embedding - encode(image)|| when an image is given
/// and the network has an encoder. Adds d(total)/d(parameters) * grad_scale into `grad`.
SampleLoss loss_and_gradient(const Network& net, const Tensor3& input, Label label,
                             const SkepxelImage* image, Network* grad, double grad_scale = 1.0);

struct TrainingSample {
  Tensor3 input;
  Label label = Label::TD;
  std::optional<SkepxelImage> image;
};

/// Network inputs (and co-learning images) for every record. Throws ValidationError
/// for unlabeled records.
std::vector<TrainingSample> prepare_training_samples(const Dataset& ds, const NetworkConfig& cfg);

struct TrainingResult {
  Network network;
  /// Mean per-sample loss of each epoch, measured on the epoch's mini-batches.
  std::vector<double> loss_history;
};

/// Mini-batch gradient descent on cross-entropy (+ lambda * distance with co-learning).
/// The batch order is a seeded shuffle per epoch, so results are bit-reproducible.
TrainingResult train_classifier(const Dataset& train, const NetworkConfig& cfg);
TrainingResult train_classifier(const std::vector<TrainingSample>& samples, const NetworkConfig& cfg,
                                const SkeletonTopology& topo = default_topology());

Label predict_label(const Network& net, const SkeletonSequence& seq);
/// Fraction of labeled records classified correctly.
double classification_accuracy(const Network& net, const Dataset& ds);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t parameters_checked = 0;
  /// Network checks only: ForwardResult::relu_margin at the checked point, and how many
  /// parameters flip some ReLU on or off when moved by +-step. Finite differences are only
  /// meaningful where that count is zero.
  double relu_margin = 0.0;
  std::size_t kink_crossings = 0;
};

/// Central-difference check of an analytic gradient. The relative error of one entry is
/// |a - n| / max(|a|, |n|, floor), and 0 when both are below `zero_tolerance`. The floor keeps
/// finite-difference round-off (about 1e-11 for step 1e-5 on an O(1) loss) from dominating
/// entries whose true gradient is near zero.
GradientCheckResult check_gradient(const std::function<double(std::span<const double>)>& loss,
                                   std::span<const double> parameters,
                                   std::span<const double> analytic, double step = 1e-5,
                                   double floor = 1e-6, double zero_tolerance = 1e-10,
                                   const std::vector<std::string>* names = nullptr);

/// Checks loss_and_gradient for every parameter of `net` on one sample. ReLU is not
/// differentiable at 0, so check at a point where no pre-activation sits exactly there
/// (freshly initialized biases are all zero, which can put whole columns on the kink).
GradientCheckResult gradient_check(const Network& net, const Tensor3& input, Label label,
                                   const SkepxelImage* image = nullptr, double step = 1e-5);

}  // namespace skelgait
