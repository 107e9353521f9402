#include "sccl/kernel.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sccl/errors.hpp"
#include "sccl/parallel.hpp"

namespace sccl {

namespace {

void check_weights(const SccWeights& wts, const SccConfig& cfg) {
  const std::size_t want_w = static_cast<std::size_t>(cfg.c_out * cfg.group_width);
  if (wts.weight.size() != want_w) {
    throw ShapeError("weight array has " + std::to_string(wts.weight.size()) +
                     " entries, config needs " + std::to_string(want_w));
  }
  const std::size_t want_b = cfg.has_bias ? static_cast<std::size_t>(cfg.c_out) : 0;
  if (wts.bias.size() != want_b) {
    throw ShapeError("bias array has " + std::to_string(wts.bias.size()) +
                     " entries, config needs " + std::to_string(want_b));
  }
}

// Shared forward core; kCount builds the single-threaded instrumented
// variant without burdening the hot path.
template <bool kCount>
Tensor4 forward_impl(const Tensor4& input, const SccWeights& wts, const SccConfig& cfg,
                     std::uint64_t* mac_count) {
  if (input.c() != cfg.c_in) {
    throw ShapeError("input has " + std::to_string(input.c()) +
                     " channels, config expects " + std::to_string(cfg.c_in));
  }
  check_weights(wts, cfg);
  const ChannelCycle cycle = compute_channel_cycle(cfg);

  Tensor4 out(input.n(), cfg.c_out, input.h(), input.w());
  const std::int64_t plane = input.h() * input.w();
  const std::int64_t rows = input.n() * cfg.c_out;
  const double work = 2.0 * static_cast<double>(plane * cfg.group_width);
  std::uint64_t macs = 0;

  auto row_body = [&](std::int64_t row) {
    const std::int64_t n = row / cfg.c_out;
    const std::int64_t oc = row % cfg.c_out;
    const std::int64_t start = window_of(cycle, oc).start;
    const double* w_row = wts.weight.data() + oc * cfg.group_width;
    const double b = cfg.has_bias ? wts.bias[static_cast<std::size_t>(oc)] : 0.0;
    double* dst = out.data() + out.index(n, oc, 0, 0);
    for (std::int64_t p = 0; p < plane; ++p) dst[p] = b;
    for (std::int64_t k = 0; k < cfg.group_width; ++k) {
      const std::int64_t ic = (start + k) % cfg.c_in;
      const double wk = w_row[k];
      const double* src = input.data() + input.index(n, ic, 0, 0);
      for (std::int64_t p = 0; p < plane; ++p) dst[p] += wk * src[p];
      if constexpr (kCount) macs += static_cast<std::uint64_t>(plane);
    }
  };

  if constexpr (kCount) {
    for (std::int64_t row = 0; row < rows; ++row) row_body(row);
    *mac_count = macs;
  } else {
    parallel_for(rows, work, row_body);
  }
  return out;
}

}  // namespace

SccWeights scc_weights_filled(const SccConfig& cfg, double weight_value,
                              double bias_value) {
  SccWeights wts;
  wts.weight.assign(static_cast<std::size_t>(cfg.c_out * cfg.group_width),
                    weight_value);
  if (cfg.has_bias) wts.bias.assign(static_cast<std::size_t>(cfg.c_out), bias_value);
  return wts;
}

SccWeights scc_weights_init(const SccConfig& cfg, Rng& rng) {
  SccWeights wts = scc_weights_filled(cfg, 0.0, 0.0);
  const double bound = std::sqrt(1.0 / static_cast<double>(cfg.group_width));
  for (double& w : wts.weight) w = rng.uniform(-bound, bound);
  return wts;
}

Tensor4 scc_forward(const Tensor4& input, const SccWeights& wts, const SccConfig& cfg) {
  return forward_impl<false>(input, wts, cfg, nullptr);
}

Tensor4 scc_forward_counted(const Tensor4& input, const SccWeights& wts,
                            const SccConfig& cfg, std::uint64_t* mac_count) {
  return forward_impl<true>(input, wts, cfg, mac_count);
}

Tensor4 scc_backward_input(const Tensor4& grad_out, const SccWeights& wts,
                           const SccConfig& cfg) {
  if (grad_out.c() != cfg.c_out) {
    throw ShapeError("grad_out has " + std::to_string(grad_out.c()) +
                     " channels, config expects " + std::to_string(cfg.c_out));
  }
  check_weights(wts, cfg);
  const ChannelCycle cycle = compute_channel_cycle(cfg);

  // Precompute, per input channel, the (filter, weight-slot) pairs that feed
  // it, so each pulled contribution is one multiply and one indexed load.
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> pulls(
      static_cast<std::size_t>(cfg.c_in));
  for (std::int64_t ic = 0; ic < cfg.c_in; ++ic) {
    for (std::int64_t oc : covering_filters(cfg, cycle, ic)) {
      const std::int64_t start = window_of(cycle, oc).start;
      const std::int64_t slot = (ic - start + cfg.c_in) % cfg.c_in;
      pulls[static_cast<std::size_t>(ic)].push_back(
          {oc, oc * cfg.group_width + slot});
    }
  }

  Tensor4 grad_in(grad_out.n(), cfg.c_in, grad_out.h(), grad_out.w());
  const std::int64_t plane = grad_out.h() * grad_out.w();
  const std::int64_t rows = grad_out.n() * cfg.c_in;
  // Each channel is covered by roughly c_out·group_width/c_in filters.
  const double avg_pulls =
      static_cast<double>(cfg.c_out * cfg.group_width) / static_cast<double>(cfg.c_in);
  parallel_for(rows, 2.0 * static_cast<double>(plane) * avg_pulls,
               [&](std::int64_t row) {
                 const std::int64_t n = row / cfg.c_in;
                 const std::int64_t ic = row % cfg.c_in;
                 double* dst = grad_in.data() + grad_in.index(n, ic, 0, 0);
                 for (const auto& [oc, w_idx] : pulls[static_cast<std::size_t>(ic)]) {
                   const double wk = wts.weight[static_cast<std::size_t>(w_idx)];
                   const double* src = grad_out.data() + grad_out.index(n, oc, 0, 0);
                   for (std::int64_t p = 0; p < plane; ++p) dst[p] += wk * src[p];
                 }
               });
  return grad_in;
}

SccParamGradients scc_backward_params(const Tensor4& grad_out, const Tensor4& input,
                                      const SccConfig& cfg) {
  if (grad_out.c() != cfg.c_out || input.c() != cfg.c_in ||
      grad_out.n() != input.n() || grad_out.h() != input.h() ||
      grad_out.w() != input.w()) {
    throw ShapeError("grad_out/input shapes inconsistent with config");
  }
  const ChannelCycle cycle = compute_channel_cycle(cfg);

  SccParamGradients grads;
  grads.grad_weight.assign(static_cast<std::size_t>(cfg.c_out * cfg.group_width), 0.0);
  if (cfg.has_bias) grads.grad_bias.assign(static_cast<std::size_t>(cfg.c_out), 0.0);

  const std::int64_t plane = input.h() * input.w();
  const double work =
      2.0 * static_cast<double>(input.n() * plane * (cfg.group_width + 1));
  // One worker owns all slots of one filter row (plus its bias entry); the
  // reduction inside each slot runs in fixed (n, y, x) order.
  parallel_for(cfg.c_out, work, [&](std::int64_t oc) {
    const std::int64_t start = window_of(cycle, oc).start;
    double* gw_row = grads.grad_weight.data() + oc * cfg.group_width;
    for (std::int64_t k = 0; k < cfg.group_width; ++k) {
      const std::int64_t ic = (start + k) % cfg.c_in;
      double sum = 0.0;
      for (std::int64_t n = 0; n < input.n(); ++n) {
        const double* g = grad_out.data() + grad_out.index(n, oc, 0, 0);
        const double* x = input.data() + input.index(n, ic, 0, 0);
        for (std::int64_t p = 0; p < plane; ++p) sum += g[p] * x[p];
      }
      gw_row[k] = sum;
    }
    if (cfg.has_bias) {
      double sum = 0.0;
      for (std::int64_t n = 0; n < input.n(); ++n) {
        const double* g = grad_out.data() + grad_out.index(n, oc, 0, 0);
        for (std::int64_t p = 0; p < plane; ++p) sum += g[p];
      }
      grads.grad_bias[static_cast<std::size_t>(oc)] = sum;
    }
  });
  return grads;
}

SccGradients scc_backward(const Tensor4& grad_out, const Tensor4& input,
                          const SccWeights& wts, const SccConfig& cfg) {
  SccGradients g;
  g.grad_input = scc_backward_input(grad_out, wts, cfg);
  g.params = scc_backward_params(grad_out, input, cfg);
  return g;
}

}  // namespace sccl
