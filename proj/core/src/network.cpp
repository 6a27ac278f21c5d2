#include "skelgait/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "skelgait/angle_features.hpp"
#include "skelgait/rng.hpp"

namespace skelgait {

void validate(const NetworkConfig& cfg) {
  if (cfg.k_max < 1) throw ConfigError("network: k_max must be >= 1");
  if (cfg.channels.empty()) throw ConfigError("network: need at least one block");
  for (std::size_t c : cfg.channels) {
    if (c == 0) throw ConfigError("network: block channels must be positive");
  }
  if (cfg.tcn_window == 0 || cfg.tcn_window % 2 == 0) {
    throw ConfigError("network: tcn_window must be odd");
  }
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("network: learning_rate must be > 0");
  if (!(cfg.lambda_distance >= 0.0)) throw ConfigError("network: lambda_distance must be >= 0");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("network: epsilon must be > 0");
  if (cfg.co_learning) {
    const auto& co = *cfg.co_learning;
    if (co.image.orderings == 0 || co.image.frames == 0) {
      throw ConfigError("network: co-learning image needs M >= 1 and T' >= 1");
    }
    if (co.patch_size == 0 || (kSkepxelSide * co.image.orderings) % co.patch_size != 0 ||
        (kSkepxelSide * co.image.frames) % co.patch_size != 0) {
      throw ConfigError("network: patch size must divide the Skepxel image");
    }
    if (co.embed_dim == 0) throw ConfigError("network: co-learning embed_dim must be positive");
  }
}

std::size_t Network::input_channels() const noexcept {
  if (gcn.empty() || adjacency.k_max() == 0) return 0;
  return gcn.front().stacked_channels() / adjacency.k_max();
}

namespace {

template <typename Matrix>
std::span<double> span_of(Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
template <typename Matrix>
std::span<const double> span_of(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
template <typename Matrix>
std::vector<std::size_t> shape_of(const Matrix& m) {
  return {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
}

template <typename Net, typename F>
void visit_parameters(Net& net, F&& f) {
  for (std::size_t b = 0; b < net.gcn.size(); ++b) {
    const std::string prefix = "block" + std::to_string(b);
    f(prefix + ".gcn.weight", shape_of(net.gcn[b].weights), span_of(net.gcn[b].weights));
    f(prefix + ".gcn.bias", std::vector<std::size_t>{static_cast<std::size_t>(net.gcn[b].bias.size())},
      span_of(net.gcn[b].bias));
    auto& t = net.tcn[b];
    f(prefix + ".tcn.kernel", std::vector<std::size_t>{t.out_channels, t.in_channels, t.window},
      std::span(t.kernel));
  }
  f(std::string("head.weight"), shape_of(net.head_weights), span_of(net.head_weights));
  f(std::string("head.bias"), std::vector<std::size_t>{static_cast<std::size_t>(net.head_bias.size())},
    span_of(net.head_bias));
  if (net.encoder) {
    auto& e = *net.encoder;
    f(std::string("encoder.projection"), shape_of(e.projection), span_of(e.projection));
    f(std::string("encoder.position"), shape_of(e.position), span_of(e.position));
    f(std::string("encoder.output.weight"), shape_of(e.output), span_of(e.output));
    f(std::string("encoder.output.bias"),
      std::vector<std::size_t>{static_cast<std::size_t>(e.output_bias.size())}, span_of(e.output_bias));
  }
}

void fill_uniform(std::span<double> values, double bound, Rng& rng) {
  for (double& v : values) v = rng.uniform(-bound, bound);
}

}  // namespace

void Network::for_each_parameter(
    const std::function<void(const std::string&, std::vector<std::size_t>, std::span<double>)>& f) {
  visit_parameters(*this, f);
}

void Network::for_each_parameter(const std::function<void(const std::string&, std::vector<std::size_t>,
                                                          std::span<const double>)>& f) const {
  visit_parameters(*this, f);
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for_each_parameter([&](const std::string&, std::vector<std::size_t>, std::span<const double> v) {
    n += v.size();
  });
  return n;
}

std::vector<double> Network::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for_each_parameter([&](const std::string&, std::vector<std::size_t>, std::span<const double> v) {
    flat.insert(flat.end(), v.begin(), v.end());
  });
  return flat;
}

void Network::assign_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw ShapeError("assign_parameters: expected " + std::to_string(parameter_count()) +
                     " values, got " + std::to_string(flat.size()));
  }
  std::size_t offset = 0;
  for_each_parameter([&](const std::string&, std::vector<std::size_t>, std::span<double> v) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), v.size(), v.begin());
    offset += v.size();
  });
}

Network make_network(const NetworkConfig& cfg, const SkeletonTopology& topo,
                     std::size_t input_channels) {
  validate(cfg);
  Network net;
  net.config = cfg;
  net.adjacency = build_multiscale_adjacency(topo, cfg.k_max);
  const auto k = static_cast<std::size_t>(cfg.k_max);
  Rng rng(cfg.seed);
  std::size_t in = input_channels;
  for (std::size_t out : cfg.channels) {
    GcnLayer g;
    g.weights.resize(static_cast<Eigen::Index>(in * k), static_cast<Eigen::Index>(out));
    g.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
    fill_uniform(span_of(g.weights), 1.0 / std::sqrt(static_cast<double>(in * k)), rng);
    TcnLayer t(out, out, cfg.tcn_window);
    fill_uniform(t.kernel, 1.0 / std::sqrt(static_cast<double>(out * cfg.tcn_window)), rng);
    net.gcn.push_back(std::move(g));
    net.tcn.push_back(std::move(t));
    in = out;
  }
  net.head_weights.resize(static_cast<Eigen::Index>(in), 2);
  fill_uniform(span_of(net.head_weights), 1.0 / std::sqrt(static_cast<double>(in)), rng);
  net.head_bias = Eigen::VectorXd::Zero(2);
  if (cfg.co_learning) {
    const auto& co = *cfg.co_learning;
    net.encoder = make_patch_encoder(kSkepxelSide * co.image.orderings,
                                     kSkepxelSide * co.image.frames, co.patch_size, co.embed_dim,
                                     in, derive_seed(cfg.seed, 0xe7c0de));
  }
  return net;
}

Network zeros_like(const Network& net) {
  Network z = net;
  z.for_each_parameter([](const std::string&, std::vector<std::size_t>, std::span<double> v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  z.trained = false;
  return z;
}

namespace {

struct ForwardCache {
  std::vector<Tensor3> block_input;   // x_b
  std::vector<Tensor3> gcn_pre;       // p_b
  std::vector<Tensor3> gcn_out;       // relu(p_b)
  std::vector<Tensor3> tcn_out;       // q_b
  Tensor3 final_out;                  // relu(q_last)
  Eigen::VectorXd embedding;
  Eigen::Vector2d logits;
};

// Exact zeros are skipped: a TCN window over an all-zero ReLU output stays exactly zero
// under small perturbations, so it is not a kink.
double min_abs(const Tensor3& x, double current) {
  for (double v : x.values()) {
    if (v != 0.0) current = std::min(current, std::abs(v));
  }
  return current;
}

ForwardCache run_forward(const Network& net, const Tensor3& input) {
  if (input.channels() != net.input_channels()) {
    throw ShapeError("forward_network: input has " + std::to_string(input.channels()) +
                     " channels, network expects " + std::to_string(net.input_channels()));
  }
  if (input.frames() == 0) throw ShapeError("forward_network: input has no frames");
  ForwardCache cache;
  Tensor3 x = input;
  for (std::size_t b = 0; b < net.gcn.size(); ++b) {
    Tensor3 p = gcn_preactivation(x, net.adjacency, net.gcn[b]);
    Tensor3 g = relu(p);
    Tensor3 q = tcn_forward(g, net.tcn[b]);
    cache.block_input.push_back(std::move(x));
    x = relu(q);
    cache.gcn_pre.push_back(std::move(p));
    cache.gcn_out.push_back(std::move(g));
    cache.tcn_out.push_back(std::move(q));
  }
  cache.embedding = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.channels()));
  const double inv = 1.0 / static_cast<double>(x.frames() * x.joints());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < x.frames(); ++t) {
      for (std::size_t j = 0; j < x.joints(); ++j) sum += x(c, t, j);
    }
    cache.embedding[static_cast<Eigen::Index>(c)] = sum * inv;
  }
  cache.final_out = std::move(x);
  cache.logits = net.head_weights.transpose() * cache.embedding + net.head_bias;
  return cache;
}

std::vector<bool> relu_pattern(const ForwardCache& cache) {
  std::vector<bool> on;
  for (std::size_t b = 0; b < cache.gcn_pre.size(); ++b) {
    for (double v : cache.gcn_pre[b].values()) on.push_back(v > 0.0);
    for (double v : cache.tcn_out[b].values()) on.push_back(v > 0.0);
  }
  return on;
}

}  // namespace

ForwardResult forward_network(const Network& net, const Tensor3& input) {
  ForwardCache cache = run_forward(net, input);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < cache.gcn_pre.size(); ++b) {
    margin = min_abs(cache.tcn_out[b], min_abs(cache.gcn_pre[b], margin));
  }
  return {cache.logits, cache.embedding, margin};
}

Tensor3 network_input(const SkeletonSequence& seq, const NetworkConfig& cfg) {
  return cfg.angle_embedding ? angle_pipeline(seq, cfg.epsilon).data : seq.data;
}

std::size_t label_index(Label label) { return label == Label::ASD ? 1 : 0; }
Label label_from_index(std::size_t index) { return index == 1 ? Label::ASD : Label::TD; }

SampleLoss loss_and_gradient(const Network& net, const Tensor3& input, Label label,
                             const SkepxelImage* image, Network* grad, double grad_scale) {
  ForwardCache cache = run_forward(net, input);
  SampleLoss loss;

  const double m = cache.logits.maxCoeff();
  const Eigen::Vector2d shifted = cache.logits.array() - m;
  const double log_sum = std::log(shifted.array().exp().sum());
  const std::size_t y = label_index(label);
  loss.cross_entropy = log_sum - shifted[static_cast<Eigen::Index>(y)];

  const bool co_learn = image != nullptr && net.encoder.has_value();
  Eigen::VectorXd skepxel_embedding;
  Eigen::VectorXd diff;
  if (co_learn) {
    skepxel_embedding = encode_image(*image, *net.encoder);
    diff = cache.embedding - skepxel_embedding;
    loss.distance = diff.norm();
  }
  loss.total = loss.cross_entropy + net.config.lambda_distance * loss.distance;
  if (grad == nullptr) return loss;

  Eigen::Vector2d dlogits = (shifted.array().exp() / std::exp(log_sum)).matrix();
  dlogits[static_cast<Eigen::Index>(y)] -= 1.0;
  dlogits *= grad_scale;
  grad->head_weights += cache.embedding * dlogits.transpose();
  grad->head_bias += dlogits;
  Eigen::VectorXd dembed = net.head_weights * dlogits;

  if (co_learn && loss.distance > 1e-12 && net.config.lambda_distance != 0.0) {
    const Eigen::VectorXd unit = diff / loss.distance;
    const double w = net.config.lambda_distance * grad_scale;
    dembed += w * unit;
    encode_image_backward(*image, *net.encoder, -w * unit, *grad->encoder);
  }

  const Tensor3& last = cache.final_out;
  Tensor3 dx(last.channels(), last.frames(), last.joints());
  const double inv = 1.0 / static_cast<double>(last.frames() * last.joints());
  for (std::size_t c = 0; c < last.channels(); ++c) {
    const double g = dembed[static_cast<Eigen::Index>(c)] * inv;
    for (std::size_t t = 0; t < last.frames(); ++t) {
      for (std::size_t j = 0; j < last.joints(); ++j) dx(c, t, j) = g;
    }
  }
  for (std::size_t b = net.gcn.size(); b-- > 0;) {
    const Tensor3& q = cache.tcn_out[b];
    for (std::size_t n = 0; n < dx.size(); ++n) {
      if (!(q.values()[n] > 0.0)) dx.values()[n] = 0.0;
    }
    Tensor3 dg = tcn_backward(cache.gcn_out[b], net.tcn[b], dx, grad->tcn[b]);
    dx = gcn_backward(cache.block_input[b], net.adjacency, net.gcn[b], cache.gcn_pre[b], dg,
                      grad->gcn[b]);
  }
  return loss;
}

std::vector<TrainingSample> prepare_training_samples(const Dataset& ds, const NetworkConfig& cfg) {
  std::vector<TrainingSample> samples;
  samples.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& seq = ds.sequences[i];
    if (!seq.label) {
      throw ValidationError("train_classifier: record " + std::to_string(i) + " ('" +
                            seq.subject_id + "') has no label");
    }
    TrainingSample s;
    s.input = network_input(seq, cfg);
    s.label = *seq.label;
    if (cfg.co_learning) s.image = build_image(seq, cfg.co_learning->image);
    samples.push_back(std::move(s));
  }
  return samples;
}

TrainingResult train_classifier(const std::vector<TrainingSample>& samples, const NetworkConfig& cfg,
                                const SkeletonTopology& topo) {
  validate(cfg);
  if (samples.empty()) throw ValidationError("train_classifier: empty training set");
  TrainingResult result{make_network(cfg, topo, samples.front().input.channels()), {}};
  Network& net = result.network;
  const std::size_t n = samples.size();
  const std::size_t batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, 1));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      Network grad = zeros_like(net);
      for (std::size_t i = start; i < end; ++i) {
        const TrainingSample& s = samples[order[i]];
        const SkepxelImage* img = s.image ? &*s.image : nullptr;
        epoch_loss += loss_and_gradient(net, s.input, s.label, img, &grad, scale).total;
      }
      std::vector<double> params = net.flat_parameters();
      const std::vector<double> g = grad.flat_parameters();
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= cfg.learning_rate * g[p];
      net.assign_parameters(params);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(n));
  }
  net.trained = true;
  return result;
}

TrainingResult train_classifier(const Dataset& train, const NetworkConfig& cfg) {
  validate(cfg);
  return train_classifier(prepare_training_samples(train, cfg), cfg, train.topology);
}

Label predict_label(const Network& net, const SkeletonSequence& seq) {
  const ForwardResult r = forward_network(net, network_input(seq, net.config));
  return r.logits[1] > r.logits[0] ? Label::ASD : Label::TD;
}

double classification_accuracy(const Network& net, const Dataset& ds) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& seq : ds.sequences) {
    if (!seq.label) continue;
    ++total;
    if (predict_label(net, seq) == *seq.label) ++correct;
  }
  if (total == 0) throw ValidationError("classification_accuracy: no labeled records");
  return static_cast<double>(correct) / static_cast<double>(total);
}

GradientCheckResult check_gradient(const std::function<double(std::span<const double>)>& loss,
                                   std::span<const double> parameters,
                                   std::span<const double> analytic, double step, double floor,
                                   double zero_tolerance, const std::vector<std::string>* names) {
  if (parameters.size() != analytic.size()) {
    throw ShapeError("check_gradient: parameter and gradient sizes differ");
  }
  GradientCheckResult result;
  std::vector<double> probe(parameters.begin(), parameters.end());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double up = loss(probe);
    probe[i] = saved - step;
    const double down = loss(probe);
    probe[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic[i];
    double rel = 0.0;
    if (std::max(std::abs(a), std::abs(numeric)) >= zero_tolerance) {
      rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
    }
    if (i == 0 || rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_parameter = names && i < names->size() ? (*names)[i] : std::to_string(i);
    }
    ++result.parameters_checked;
  }
  return result;
}

GradientCheckResult gradient_check(const Network& net, const Tensor3& input, Label label,
                                   const SkepxelImage* image, double step) {
  Network grad = zeros_like(net);
  loss_and_gradient(net, input, label, image, &grad);
  std::vector<std::string> names;
  net.for_each_parameter([&](const std::string& name, std::vector<std::size_t>,
                             std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) names.push_back(name + "[" + std::to_string(i) + "]");
  });
  Network probe = net;
  auto loss = [&](std::span<const double> params) {
    probe.assign_parameters(params);
    return loss_and_gradient(probe, input, label, image, nullptr).total;
  };
  const std::vector<double> params = net.flat_parameters();
  const std::vector<double> analytic = grad.flat_parameters();
  auto result = check_gradient(loss, params, analytic, step, 1e-6, 1e-10, &names);
  result.relu_margin = forward_network(net, input).relu_margin;
  const auto base = relu_pattern(run_forward(net, input));
  std::vector<double> shifted = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (double sign : {1.0, -1.0}) {
      shifted[i] = params[i] + sign * step;
      probe.assign_parameters(shifted);
      if (relu_pattern(run_forward(probe, input)) != base) {
        ++result.kink_crossings;
        break;
      }
    }
    shifted[i] = params[i];
  }
  return result;
}

}  // namespace skelgait
