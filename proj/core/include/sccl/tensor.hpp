#pragma once

#include <cstdint>
#include <vector>

#include "sccl/rng.hpp"

namespace sccl {

/// Dense 4-D array of doubles, row-major in (batch, channel, row, col)
/// order. The one tensor type used for feature maps and their gradients.
/// Extents are fixed at construction; element data is mutable only through
/// the owning operation (library functions construct, fill, and then treat
/// tensors as read-only inputs).
class Tensor4 {
 public:
  Tensor4() = default;

  /// Zero-initialized tensor. Throws ShapeError unless every extent >= 1.
  Tensor4(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w);

  std::int64_t n() const { return n_; }
  std::int64_t c() const { return c_; }
  std::int64_t h() const { return h_; }
  std::int64_t w() const { return w_; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  /// Flat offset of (n, c, y, x); no bounds check (hot-loop path).
  std::int64_t index(std::int64_t n, std::int64_t c, std::int64_t y,
                     std::int64_t x) const {
    return ((n * c_ + c) * h_ + y) * w_ + x;
  }

  /// Bounds-checked element access; throws IndexError when out of range.
  double& at(std::int64_t n, std::int64_t c, std::int64_t y, std::int64_t x);
  double at(std::int64_t n, std::int64_t c, std::int64_t y, std::int64_t x) const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Tensor4& other) const {
    return n_ == other.n_ && c_ == other.c_ && h_ == other.h_ && w_ == other.w_;
  }

 private:
  std::int64_t n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<double> data_;
};

/// Tensor of the given shape with every element set to value.
Tensor4 tensor_filled(std::int64_t n, std::int64_t c, std::int64_t h,
                      std::int64_t w, double value);

/// Tensor filled with i.i.d. standard-normal draws from rng.
Tensor4 tensor_normal(std::int64_t n, std::int64_t c, std::int64_t h,
                      std::int64_t w, Rng& rng);

/// Tensor filled with i.i.d. uniform draws in [lo, hi).
Tensor4 tensor_uniform(std::int64_t n, std::int64_t c, std::int64_t h,
                       std::int64_t w, double lo, double hi, Rng& rng);

/// Channels [start, start+length) of t taken cyclically: output channel k is
/// source channel (start + k) mod t.c. The window may wrap past the last
/// channel back to channel 0. Requires 0 <= start < t.c (IndexError) and
/// 1 <= length <= t.c (ShapeError).
Tensor4 slice_channels_cyclic(const Tensor4& t, std::int64_t start,
                              std::int64_t length);

/// Concatenates parts along the channel axis in list order. All parts must
/// share batch and spatial extents (ShapeError); the list must be non-empty
/// (ArgumentError).
Tensor4 concat_channels(const std::vector<Tensor4>& parts);

/// Largest elementwise |a - b|; shapes must match (ShapeError).
double max_abs_diff(const Tensor4& a, const Tensor4& b);

}  // namespace sccl
