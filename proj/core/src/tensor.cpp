#include "sccl/tensor.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "sccl/errors.hpp"

namespace sccl {

namespace {

void check_extents(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) {
  if (n < 1 || c < 1 || h < 1 || w < 1) {
    throw ShapeError("tensor extents must all be >= 1, got (" + std::to_string(n) +
                     ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
                     std::to_string(w) + ")");
  }
}

}  // namespace

Tensor4::Tensor4(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w)
    : n_(n), c_(c), h_(h), w_(w) {
  check_extents(n, c, h, w);
  data_.assign(static_cast<std::size_t>(n * c * h * w), 0.0);
}

double& Tensor4::at(std::int64_t n, std::int64_t c, std::int64_t y, std::int64_t x) {
  if (n < 0 || n >= n_ || c < 0 || c >= c_ || y < 0 || y >= h_ || x < 0 || x >= w_) {
    throw IndexError("tensor index (" + std::to_string(n) + ", " + std::to_string(c) +
                     ", " + std::to_string(y) + ", " + std::to_string(x) +
                     ") out of range for shape (" + std::to_string(n_) + ", " +
                     std::to_string(c_) + ", " + std::to_string(h_) + ", " +
                     std::to_string(w_) + ")");
  }
  return data_[static_cast<std::size_t>(index(n, c, y, x))];
}

double Tensor4::at(std::int64_t n, std::int64_t c, std::int64_t y,
                   std::int64_t x) const {
  return const_cast<Tensor4*>(this)->at(n, c, y, x);
}

Tensor4 tensor_filled(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w,
                      double value) {
  Tensor4 t(n, c, h, w);
  double* p = t.data();
  const std::int64_t count = t.size();
  for (std::int64_t i = 0; i < count; ++i) p[i] = value;
  return t;
}

Tensor4 tensor_normal(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w,
                      Rng& rng) {
  Tensor4 t(n, c, h, w);
  double* p = t.data();
  const std::int64_t count = t.size();
  for (std::int64_t i = 0; i < count; ++i) p[i] = rng.normal();
  return t;
}

Tensor4 tensor_uniform(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w,
                       double lo, double hi, Rng& rng) {
  Tensor4 t(n, c, h, w);
  double* p = t.data();
  const std::int64_t count = t.size();
  for (std::int64_t i = 0; i < count; ++i) p[i] = rng.uniform(lo, hi);
  return t;
}

Tensor4 slice_channels_cyclic(const Tensor4& t, std::int64_t start,
                              std::int64_t length) {
  if (start < 0 || start >= t.c()) {
    throw IndexError("slice start " + std::to_string(start) +
                     " out of range for " + std::to_string(t.c()) + " channels");
  }
  if (length < 1 || length > t.c()) {
    throw ShapeError("slice length " + std::to_string(length) +
                     " out of range for " + std::to_string(t.c()) + " channels");
  }
  Tensor4 out(t.n(), length, t.h(), t.w());
  const std::int64_t plane = t.h() * t.w();
  const std::size_t plane_bytes = static_cast<std::size_t>(plane) * sizeof(double);
  for (std::int64_t n = 0; n < t.n(); ++n) {
    for (std::int64_t k = 0; k < length; ++k) {
      const std::int64_t src_c = (start + k) % t.c();
      std::memcpy(out.data() + out.index(n, k, 0, 0),
                  t.data() + t.index(n, src_c, 0, 0), plane_bytes);
    }
  }
  return out;
}

Tensor4 concat_channels(const std::vector<Tensor4>& parts) {
  if (parts.empty()) throw ArgumentError("concat_channels needs at least one tensor");
  const Tensor4& head = parts.front();
  std::int64_t total_c = 0;
  for (const Tensor4& p : parts) {
    if (p.n() != head.n() || p.h() != head.h() || p.w() != head.w()) {
      throw ShapeError("concat_channels parts must share batch and spatial extents");
    }
    total_c += p.c();
  }
  Tensor4 out(head.n(), total_c, head.h(), head.w());
  const std::int64_t plane = head.h() * head.w();
  for (std::int64_t n = 0; n < head.n(); ++n) {
    std::int64_t dst_c = 0;
    for (const Tensor4& p : parts) {
      std::memcpy(out.data() + out.index(n, dst_c, 0, 0),
                  p.data() + p.index(n, 0, 0, 0),
                  static_cast<std::size_t>(p.c() * plane) * sizeof(double));
      dst_c += p.c();
    }
  }
  return out;
}

double max_abs_diff(const Tensor4& a, const Tensor4& b) {
  if (!a.same_shape(b)) throw ShapeError("max_abs_diff requires matching shapes");
  double worst = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  const std::int64_t count = a.size();
  for (std::int64_t i = 0; i < count; ++i) {
    const double d = std::fabs(pa[i] - pb[i]);
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace sccl
