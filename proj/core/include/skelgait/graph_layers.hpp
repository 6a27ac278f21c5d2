#pragma once

#include <vector>

#include <Eigen/Core>

#include "skelgait/adjacency.hpp"
#include "skelgait/tensor.hpp"

namespace skelgait {

/// Row-major so that a parameter matrix flattens in (row, column) order.
using ParamMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Multi-scale spatial graph convolution.
///
/// Each scale k aggregates joints with its normalized adjacency; the K aggregated
/// copies of the input are stacked along channels (scale-major) and projected by
/// `weights` (in_channels*K x out_channels) before bias and ReLU.
struct GcnLayer {
  ParamMatrix weights;
  Eigen::VectorXd bias;

  std::size_t out_channels() const noexcept { return static_cast<std::size_t>(weights.cols()); }
  std::size_t stacked_channels() const noexcept { return static_cast<std::size_t>(weights.rows()); }
};

/// Temporal convolution over frames: stride 1, no bias, same-length output with the end
/// frames replicated as padding.
struct TcnLayer {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t window = 1;
  /// Flattened (out, in, window).
  std::vector<double> kernel;

  TcnLayer() = default;
  TcnLayer(std::size_t out, std::size_t in, std::size_t w)
      : out_channels(out), in_channels(in), window(w), kernel(out * in * w, 0.0) {}

  double& at(std::size_t o, std::size_t c, std::size_t w) {
    return kernel[(o * in_channels + c) * window + w];
  }
  double at(std::size_t o, std::size_t c, std::size_t w) const {
    return kernel[(o * in_channels + c) * window + w];
  }
};

/// Scale-aggregated input: out[k*C + c, t, i] = sum_j x[c, t, j] * A_k[j, i].
Tensor3 aggregate_scales(const Tensor3& x, const MultiScaleAdjacency& msa);

/// Projection of the aggregated input plus bias, before the activation.
Tensor3 gcn_preactivation(const Tensor3& x, const MultiScaleAdjacency& msa, const GcnLayer& layer);

/// ReLU(gcn_preactivation).
Tensor3 gcn_forward(const Tensor3& x, const MultiScaleAdjacency& msa, const GcnLayer& layer);

/// Backpropagates `grad_out` (gradient w.r.t. the ReLU output) through the layer.
/// Parameter gradients are accumulated into `grad_layer`; returns the input gradient.
Tensor3 gcn_backward(const Tensor3& x, const MultiScaleAdjacency& msa, const GcnLayer& layer,
                     const Tensor3& preactivation, const Tensor3& grad_out, GcnLayer& grad_layer);

Tensor3 tcn_forward(const Tensor3& x, const TcnLayer& layer);

/// Accumulates the kernel gradient into `grad_layer`; returns the input gradient.
Tensor3 tcn_backward(const Tensor3& x, const TcnLayer& layer, const Tensor3& grad_out,
                     TcnLayer& grad_layer);

Tensor3 relu(const Tensor3& x);

}  // namespace skelgait
