#include "skelgait/graph_layers.hpp"

#include <algorithm>
#include <string>

namespace skelgait {

namespace {

void check_gcn_shapes(const Tensor3& x, const MultiScaleAdjacency& msa, const GcnLayer& layer) {
  if (msa.k_max() == 0) throw ShapeError("gcn: no adjacency scales");
  if (x.joints() != msa.joints()) {
    throw ShapeError("gcn: input has " + std::to_string(x.joints()) + " joints, adjacency " +
                     std::to_string(msa.joints()));
  }
  if (layer.stacked_channels() != x.channels() * msa.k_max()) {
    throw ShapeError("gcn: weights expect " + std::to_string(layer.stacked_channels()) +
                     " stacked channels, input provides " +
                     std::to_string(x.channels() * msa.k_max()));
  }
  if (static_cast<std::size_t>(layer.bias.size()) != layer.out_channels()) {
    throw ShapeError("gcn: bias length does not match output channels");
  }
}

}  // namespace

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMatrix>;
using ConstMatrixView = Eigen::Map<const RowMatrix>;

// The tensor laid out as rows x cols, row-major.
MatrixView view(Tensor3& x, std::size_t rows, std::size_t cols) {
  return {x.values().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}
ConstMatrixView view(const Tensor3& x, std::size_t rows, std::size_t cols) {
  return {x.values().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

}  // namespace

Tensor3 aggregate_scales(const Tensor3& x, const MultiScaleAdjacency& msa) {
  const std::size_t rows = x.channels() * x.frames();
  const std::size_t joints = x.joints();
  Tensor3 out(x.channels() * msa.k_max(), x.frames(), joints);
  auto src = view(x, rows, joints);
  auto dst = view(out, rows * msa.k_max(), joints);
  for (std::size_t k = 0; k < msa.k_max(); ++k) {
    dst.middleRows(static_cast<Eigen::Index>(k * rows), static_cast<Eigen::Index>(rows)).noalias() =
        src * msa.scales[k];
  }
  return out;
}

Tensor3 gcn_preactivation(const Tensor3& x, const MultiScaleAdjacency& msa, const GcnLayer& layer) {
  check_gcn_shapes(x, msa, layer);
  const Tensor3 z = aggregate_scales(x, msa);
  const std::size_t cols = x.frames() * x.joints();
  Tensor3 out(layer.out_channels(), x.frames(), x.joints());
  auto dst = view(out, layer.out_channels(), cols);
  dst.noalias() = layer.weights.transpose() * view(z, z.channels(), cols);
  dst.colwise() += layer.bias;
  return out;
}

Tensor3 relu(const Tensor3& x) {
  Tensor3 out = x;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor3 gcn_forward(const Tensor3& x, const MultiScaleAdjacency& msa, const GcnLayer& layer) {
  return relu(gcn_preactivation(x, msa, layer));
}

Tensor3 gcn_backward(const Tensor3& x, const MultiScaleAdjacency& msa, const GcnLayer& layer,
                     const Tensor3& preactivation, const Tensor3& grad_out, GcnLayer& grad_layer) {
  check_gcn_shapes(x, msa, layer);
  require_same_shape(preactivation, grad_out, "gcn_backward");
  const Tensor3 z = aggregate_scales(x, msa);
  const std::size_t cols = x.frames() * x.joints();
  const std::size_t out_channels = layer.out_channels();

  Tensor3 dp = grad_out;
  for (std::size_t n = 0; n < dp.size(); ++n) {
    if (!(preactivation.values()[n] > 0.0)) dp.values()[n] = 0.0;
  }
  const auto dp_view = view(dp, out_channels, cols);
  const auto z_view = view(z, z.channels(), cols);
  grad_layer.weights.noalias() += z_view * dp_view.transpose();
  grad_layer.bias += dp_view.rowwise().sum();

  Tensor3 dz(z.channels(), x.frames(), x.joints());
  view(dz, z.channels(), cols).noalias() = layer.weights * dp_view;

  const std::size_t rows = x.channels() * x.frames();
  Tensor3 dx(x.channels(), x.frames(), x.joints());
  auto dx_view = view(dx, rows, x.joints());
  const auto dz_rows = view(dz, rows * msa.k_max(), x.joints());
  for (std::size_t k = 0; k < msa.k_max(); ++k) {
    dx_view.noalias() +=
        dz_rows.middleRows(static_cast<Eigen::Index>(k * rows), static_cast<Eigen::Index>(rows)) *
        msa.scales[k].transpose();
  }
  return dx;
}

namespace {

void check_tcn_shapes(const Tensor3& x, const TcnLayer& layer) {
  if (layer.window % 2 == 0) throw ShapeError("tcn: window must be odd");
  if (layer.kernel.size() != layer.out_channels * layer.in_channels * layer.window) {
    throw ShapeError("tcn: kernel size does not match its declared shape");
  }
  if (x.channels() != layer.in_channels) {
    throw ShapeError("tcn: input has " + std::to_string(x.channels()) + " channels, kernel expects " +
                     std::to_string(layer.in_channels));
  }
  if (layer.window > 2 * x.frames() - 1) {
    throw ShapeError("tcn: window " + std::to_string(layer.window) + " too wide for " +
                     std::to_string(x.frames()) + " frames");
  }
}

}  // namespace

namespace {

// Same padding by edge replication: frames outside [0, T) read the nearest end frame.
std::size_t source_frame(std::ptrdiff_t t, std::ptrdiff_t shift, std::ptrdiff_t frames) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(t + shift, 0, frames - 1));
}

}  // namespace

Tensor3 tcn_forward(const Tensor3& x, const TcnLayer& layer) {
  check_tcn_shapes(x, layer);
  const auto frames = static_cast<std::ptrdiff_t>(x.frames());
  const auto pad = static_cast<std::ptrdiff_t>(layer.window / 2);
  const std::size_t joints = x.joints();
  Tensor3 out(layer.out_channels, x.frames(), joints);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    for (std::size_t c = 0; c < layer.in_channels; ++c) {
      for (std::size_t w = 0; w < layer.window; ++w) {
        const double k = layer.at(o, c, w);
        if (k == 0.0) continue;
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(w) - pad;
        for (std::ptrdiff_t t = 0; t < frames; ++t) {
          const std::size_t src = source_frame(t, shift, frames);
          double* dst = &out(o, static_cast<std::size_t>(t), 0);
          const double* in = &x(c, src, 0);
          for (std::size_t j = 0; j < joints; ++j) dst[j] += k * in[j];
        }
      }
    }
  }
  return out;
}

Tensor3 tcn_backward(const Tensor3& x, const TcnLayer& layer, const Tensor3& grad_out,
                     TcnLayer& grad_layer) {
  check_tcn_shapes(x, layer);
  if (grad_out.channels() != layer.out_channels || grad_out.frames() != x.frames() ||
      grad_out.joints() != x.joints()) {
    throw ShapeError("tcn_backward: gradient has shape " + grad_out.shape_string());
  }
  const auto frames = static_cast<std::ptrdiff_t>(x.frames());
  const auto pad = static_cast<std::ptrdiff_t>(layer.window / 2);
  const std::size_t joints = x.joints();
  Tensor3 dx(x.channels(), x.frames(), joints);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    for (std::size_t c = 0; c < layer.in_channels; ++c) {
      for (std::size_t w = 0; w < layer.window; ++w) {
        const double k = layer.at(o, c, w);
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(w) - pad;
        double dk = 0.0;
        for (std::ptrdiff_t t = 0; t < frames; ++t) {
          const std::size_t src = source_frame(t, shift, frames);
          const double* g = &grad_out(o, static_cast<std::size_t>(t), 0);
          const double* in = &x(c, src, 0);
          double* d = &dx(c, src, 0);
          for (std::size_t j = 0; j < joints; ++j) {
            dk += g[j] * in[j];
            d[j] += k * g[j];
          }
        }
        grad_layer.at(o, c, w) += dk;
      }
    }
  }
  return dx;
}

}  // namespace skelgait
