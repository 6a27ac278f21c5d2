#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "skelgait/errors.hpp"

namespace skelgait {

/// Dense channels x frames x joints tensor, row-major with joints fastest.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t channels, std::size_t frames, std::size_t joints, double fill = 0.0)
      : channels_(channels), frames_(frames), joints_(joints),
        data_(channels * frames * joints, fill) {}

  std::size_t channels() const noexcept { return channels_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t joints() const noexcept { return joints_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t c, std::size_t t, std::size_t j) noexcept {
    return data_[(c * frames_ + t) * joints_ + j];
  }
  const double& operator()(std::size_t c, std::size_t t, std::size_t j) const noexcept {
    return data_[(c * frames_ + t) * joints_ + j];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Tensor3& other) const noexcept {
    return channels_ == other.channels_ && frames_ == other.frames_ && joints_ == other.joints_;
  }

  std::string shape_string() const {
    return std::to_string(channels_) + "x" + std::to_string(frames_) + "x" +
           std::to_string(joints_);
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t joints_ = 0;
  std::vector<double> data_;
};

inline void require_same_shape(const Tensor3& a, const Tensor3& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

}  // namespace skelgait
