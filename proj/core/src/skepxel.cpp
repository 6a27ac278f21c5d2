#include "skelgait/skepxel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

#include "skelgait/rng.hpp"

namespace skelgait {

std::vector<JointOrdering> generate_orderings(std::size_t count, std::uint64_t seed,
                                              std::size_t joints) {
  if (count < 1) throw ConfigError("generate_orderings: need at least one ordering");
  if (joints <= 20) {
    std::uint64_t total = 1;
    for (std::size_t i = 2; i <= joints; ++i) total *= i;
    if (count > total) throw ConfigError("generate_orderings: more orderings than permutations");
  }
  std::vector<JointOrdering> out;
  JointOrdering canonical(joints);
  std::iota(canonical.begin(), canonical.end(), std::size_t{0});
  out.push_back(canonical);
  std::set<JointOrdering> seen{canonical};
  Rng rng(seed);
  while (out.size() < count) {
    JointOrdering perm = canonical;
    rng.shuffle(perm);
    if (seen.insert(perm).second) out.push_back(std::move(perm));
  }
  return out;
}

Tensor3 build_skepxel(const JointFrame& frame, const JointOrdering& ordering) {
  constexpr std::size_t cells = kSkepxelSide * kSkepxelSide;
  if (ordering.size() != cells || static_cast<std::size_t>(frame.cols()) != cells) {
    throw ShapeError("build_skepxel: expected 25 joints and a 25-entry ordering");
  }
  Tensor3 px(3, kSkepxelSide, kSkepxelSide);
  for (std::size_t p = 0; p < cells; ++p) {
    for (std::size_t c = 0; c < 3; ++c) {
      px(c, p / kSkepxelSide, p % kSkepxelSide) =
          frame(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(ordering[p]));
    }
  }
  return px;
}

std::vector<std::size_t> sample_frame_indices(std::size_t frames, std::size_t samples) {
  if (frames < 1 || samples < 1) throw ConfigError("sample_frame_indices: empty range");
  std::vector<std::size_t> idx(samples, 0);
  if (samples == 1) return idx;
  for (std::size_t t = 0; t < samples; ++t) {
    // round(t * (frames - 1) / (samples - 1)) in integer arithmetic
    idx[t] = (2 * t * (frames - 1) + (samples - 1)) / (2 * (samples - 1));
  }
  return idx;
}

SkepxelImage build_image(const SkeletonSequence& seq, std::size_t orderings, std::size_t frames,
                         std::uint64_t seed) {
  if (orderings < 1 || frames < 1) throw ConfigError("build_image: M and T' must be >= 1");
  if (seq.channels() != 3 || seq.joints() != kBodyJoints || seq.frames() < 1) {
    throw ShapeError("build_image: expected a 3 x T x 25 sequence, got " + seq.data.shape_string());
  }
  SkepxelImage img;
  img.orderings = generate_orderings(orderings, seed);
  img.frame_indices = sample_frame_indices(seq.frames(), frames);
  img.pixels = Tensor3(3, kSkepxelSide * orderings, kSkepxelSide * frames);
  constexpr std::size_t cells = kSkepxelSide * kSkepxelSide;
  for (std::size_t m = 0; m < orderings; ++m) {
    const JointOrdering& order = img.orderings[m];
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t f = img.frame_indices[t];
      for (std::size_t p = 0; p < cells; ++p) {
        const std::size_t row = m * kSkepxelSide + p / kSkepxelSide;
        const std::size_t col = t * kSkepxelSide + p % kSkepxelSide;
        for (std::size_t c = 0; c < 3; ++c) img.pixels(c, row, col) = seq.data(c, f, order[p]);
      }
    }
  }
  return img;
}

SkepxelImage build_image(const SkeletonSequence& seq, const SkepxelConfig& cfg) {
  return build_image(seq, cfg.orderings, cfg.frames, cfg.seed);
}

JointFrame extract_frame(const SkepxelImage& image, std::size_t ordering_block,
                         std::size_t frame_block) {
  if (ordering_block >= image.orderings.size() || frame_block >= image.frame_indices.size()) {
    throw ShapeError("extract_frame: block index out of range");
  }
  constexpr std::size_t cells = kSkepxelSide * kSkepxelSide;
  JointFrame frame(3, static_cast<Eigen::Index>(cells));
  const JointOrdering& order = image.orderings[ordering_block];
  for (std::size_t p = 0; p < cells; ++p) {
    const std::size_t row = ordering_block * kSkepxelSide + p / kSkepxelSide;
    const std::size_t col = frame_block * kSkepxelSide + p % kSkepxelSide;
    for (std::size_t c = 0; c < 3; ++c) {
      frame(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(order[p])) =
          image.pixels(c, row, col);
    }
  }
  return frame;
}

namespace {

void fill_uniform(ParamMatrix& m, double bound, Rng& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
  }
}

void check_encoder(const SkepxelImage& image, const PatchEncoder& enc) {
  if (enc.patch_size == 0 || image.height() % enc.patch_size != 0 ||
      image.width() % enc.patch_size != 0) {
    throw ShapeError("encode_image: patch size " + std::to_string(enc.patch_size) +
                     " does not divide a " + std::to_string(image.height()) + "x" +
                     std::to_string(image.width()) + " image");
  }
  if (image.height() != enc.image_height || image.width() != enc.image_width) {
    throw ShapeError("encode_image: encoder was built for " + std::to_string(enc.image_height) +
                     "x" + std::to_string(enc.image_width) + " images");
  }
  const std::size_t in_dim = image.pixels.channels() * enc.patch_size * enc.patch_size;
  if (static_cast<std::size_t>(enc.projection.rows()) != in_dim) {
    throw ShapeError("encode_image: projection expects " + std::to_string(enc.projection.rows()) +
                     " inputs per patch, image gives " + std::to_string(in_dim));
  }
}

// Sum over patches of the flattened patch vectors.
Eigen::VectorXd patch_sum(const SkepxelImage& image, std::size_t p) {
  const std::size_t channels = image.pixels.channels();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(channels * p * p));
  for (std::size_t pr = 0; pr < image.height() / p; ++pr) {
    for (std::size_t pc = 0; pc < image.width() / p; ++pc) {
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t y = 0; y < p; ++y) {
          for (std::size_t x = 0; x < p; ++x) {
            sum[static_cast<Eigen::Index>((c * p + y) * p + x)] +=
                image.pixels(c, pr * p + y, pc * p + x);
          }
        }
      }
    }
  }
  return sum;
}

}  // namespace

PatchEncoder make_patch_encoder(std::size_t image_height, std::size_t image_width,
                                std::size_t patch_size, std::size_t embed_dim, std::size_t out_dim,
                                std::uint64_t seed) {
  if (patch_size == 0 || image_height % patch_size != 0 || image_width % patch_size != 0) {
    throw ConfigError("make_patch_encoder: patch size must divide the image");
  }
  if (embed_dim == 0 || out_dim == 0) throw ConfigError("make_patch_encoder: empty dimensions");
  PatchEncoder enc;
  enc.patch_size = patch_size;
  enc.image_height = image_height;
  enc.image_width = image_width;
  const auto in_dim = static_cast<Eigen::Index>(3 * patch_size * patch_size);
  const auto d = static_cast<Eigen::Index>(embed_dim);
  enc.projection.resize(in_dim, d);
  enc.position.resize(static_cast<Eigen::Index>(enc.patch_count()), d);
  enc.output.resize(d, static_cast<Eigen::Index>(out_dim));
  enc.output_bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_dim));
  Rng rng(seed);
  fill_uniform(enc.projection, 1.0 / std::sqrt(static_cast<double>(in_dim)), rng);
  fill_uniform(enc.position, 1.0 / std::sqrt(static_cast<double>(in_dim)), rng);
  fill_uniform(enc.output, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  return enc;
}

PatchEncoder zeros_like(const PatchEncoder& enc) {
  PatchEncoder z = enc;
  z.projection.setZero();
  z.position.setZero();
  z.output.setZero();
  z.output_bias.setZero();
  return z;
}

Eigen::VectorXd encode_image(const SkepxelImage& image, const PatchEncoder& enc) {
  check_encoder(image, enc);
  const double inv_n = 1.0 / static_cast<double>(enc.patch_count());
  // mean_n (P^T v_n + pos_n) = P^T mean(v) + mean(pos)
  const Eigen::VectorXd mean_patch = patch_sum(image, enc.patch_size) * inv_n;
  const Eigen::VectorXd pooled =
      enc.projection.transpose() * mean_patch + enc.position.colwise().sum().transpose() * inv_n;
  return enc.output.transpose() * pooled + enc.output_bias;
}

void encode_image_backward(const SkepxelImage& image, const PatchEncoder& enc,
                           const Eigen::VectorXd& grad_output, PatchEncoder& grad) {
  check_encoder(image, enc);
  const double inv_n = 1.0 / static_cast<double>(enc.patch_count());
  const Eigen::VectorXd mean_patch = patch_sum(image, enc.patch_size) * inv_n;
  const Eigen::VectorXd pooled =
      enc.projection.transpose() * mean_patch + enc.position.colwise().sum().transpose() * inv_n;
  grad.output += pooled * grad_output.transpose();
  grad.output_bias += grad_output;
  const Eigen::VectorXd grad_pooled = enc.output * grad_output;
  grad.projection += mean_patch * grad_pooled.transpose();
  grad.position.rowwise() += (grad_pooled * inv_n).transpose();
}

double distance_loss(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw ShapeError("distance_loss: embeddings have dimensions " + std::to_string(a.size()) +
                     " and " + std::to_string(b.size()));
  }
  return (a - b).norm();
}

void write_image_npy(const SkepxelImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                       std::to_string(image.pixels.channels()) + ", " +
                       std::to_string(image.height()) + ", " + std::to_string(image.width()) +
                       "), }";
  // magic(6) + version(2) + header_len(2) + header, padded to a multiple of 64 with '\n' last.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');
  out.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (double v : image.pixels.values()) {
    unsigned char bytes[8];
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_image_ppm(const SkepxelImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::size_t channels = std::min<std::size_t>(3, image.pixels.channels());
  double lo[3] = {0, 0, 0};
  double hi[3] = {0, 0, 0};
  for (std::size_t c = 0; c < channels; ++c) {
    lo[c] = hi[c] = image.pixels(c, 0, 0);
    for (std::size_t r = 0; r < image.height(); ++r) {
      for (std::size_t q = 0; q < image.width(); ++q) {
        lo[c] = std::min(lo[c], image.pixels(c, r, q));
        hi[c] = std::max(hi[c], image.pixels(c, r, q));
      }
    }
  }
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t q = 0; q < image.width(); ++q) {
      for (std::size_t c = 0; c < 3; ++c) {
        double v = 0.0;
        if (c < channels && hi[c] > lo[c]) v = (image.pixels(c, r, q) - lo[c]) / (hi[c] - lo[c]);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
      }
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace skelgait
