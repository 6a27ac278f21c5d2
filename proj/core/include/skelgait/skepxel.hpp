#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "skelgait/graph_layers.hpp"
#include "skelgait/skeleton.hpp"

namespace skelgait {

inline constexpr std::size_t kSkepxelSide = 5;

/// Joint permutation: position p of the superpixel holds joint ordering[p].
using JointOrdering = std::vector<std::size_t>;

/// One frame of joint coordinates, 3 x J.
using JointFrame = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Float image of tiled superpixels: pixels is 3 x H x W with H = 5M and W = 5T'.
/// Row block m uses orderings[m]; column block t shows frame frame_indices[t].
struct SkepxelImage {
  Tensor3 pixels;
  std::vector<JointOrdering> orderings;
  std::vector<std::size_t> frame_indices;

  std::size_t height() const noexcept { return pixels.frames(); }
  std::size_t width() const noexcept { return pixels.joints(); }
  double pixel(std::size_t c, std::size_t row, std::size_t col) const { return pixels(c, row, col); }
};

struct SkepxelConfig {
  std::size_t orderings = 4;
  std::size_t frames = 20;
  std::uint64_t seed = 0;
};

/// Canonical anatomical order first, then M-1 seeded, pairwise-distinct random permutations.
std::vector<JointOrdering> generate_orderings(std::size_t count, std::uint64_t seed,
                                              std::size_t joints = kBodyJoints);

/// 3 x 5 x 5 superpixel; joint ordering[p] lands at (p / 5, p % 5), channel c holds coordinate c.
Tensor3 build_skepxel(const JointFrame& frame, const JointOrdering& ordering);

/// Evenly spaced frame indices over [0, frames).
std::vector<std::size_t> sample_frame_indices(std::size_t frames, std::size_t samples);

SkepxelImage build_image(const SkeletonSequence& seq, std::size_t orderings, std::size_t frames,
                         std::uint64_t seed);
SkepxelImage build_image(const SkeletonSequence& seq, const SkepxelConfig& cfg);

/// Inverse tiling: the 3 x 25 joint coordinates stored in row block m, column block t.
JointFrame extract_frame(const SkepxelImage& image, std::size_t ordering_block,
                         std::size_t frame_block);

/// Linear stand-in for a vision transformer: non-overlapping P x P patches are
/// flattened (channel-major), linearly projected to D dims, offset by a learned
/// per-patch position embedding, mean-pooled and mapped by an output layer to D_out.
struct PatchEncoder {
  std::size_t patch_size = kSkepxelSide;
  std::size_t image_height = 0;
  std::size_t image_width = 0;
  ParamMatrix projection;  ///< 3P^2 x D
  ParamMatrix position;    ///< patches x D
  ParamMatrix output;      ///< D x D_out
  Eigen::VectorXd output_bias; ///< D_out

  std::size_t patch_count() const noexcept {
    return (image_height / patch_size) * (image_width / patch_size);
  }
  std::size_t embed_dim() const noexcept { return static_cast<std::size_t>(projection.cols()); }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(output.cols()); }
};

/// Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
PatchEncoder make_patch_encoder(std::size_t image_height, std::size_t image_width,
                                std::size_t patch_size, std::size_t embed_dim,
                                std::size_t out_dim, std::uint64_t seed);

/// Same shapes as `enc`, all zeros; used as a gradient accumulator.
PatchEncoder zeros_like(const PatchEncoder& enc);

Eigen::VectorXd encode_image(const SkepxelImage& image, const PatchEncoder& enc);

/// Accumulates d(loss)/d(parameters) into `grad` given d(loss)/d(output).
void encode_image_backward(const SkepxelImage& image, const PatchEncoder& enc,
                           const Eigen::VectorXd& grad_output, PatchEncoder& grad);

/// Euclidean distance between two embeddings.
double distance_loss(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Float64 .npy array of shape (3, H, W).
void write_image_npy(const SkepxelImage& image, const std::filesystem::path& path);
/// 8-bit binary PPM, per-channel min-max scaled; for viewing only.
void write_image_ppm(const SkepxelImage& image, const std::filesystem::path& path);

}  // namespace skelgait
