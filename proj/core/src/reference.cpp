#include "sccl/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "sccl/errors.hpp"
#include "sccl/parallel.hpp"

namespace sccl {

std::int64_t conv_output_extent(std::int64_t in, std::int64_t kernel,
                                std::int64_t stride, std::int64_t padding) {
  return (in + 2 * padding - kernel) / stride + 1;
}

void validate_conv_spec(const ConvSpec& spec) {
  if (spec.c_in < 1 || spec.c_out < 1) {
    throw ConfigError("channel counts must be >= 1");
  }
  if (spec.kernel < 1) throw ConfigError("kernel size must be >= 1");
  if (spec.stride < 1) throw ConfigError("stride must be >= 1");
  if (spec.padding < 0) throw ConfigError("padding must be >= 0");
  if (spec.groups < 1 || spec.c_in % spec.groups != 0 ||
      spec.c_out % spec.groups != 0) {
    throw ConfigError("groups=" + std::to_string(spec.groups) +
                      " must divide c_in=" + std::to_string(spec.c_in) +
                      " and c_out=" + std::to_string(spec.c_out));
  }
}

namespace {

std::size_t weight_count(const ConvSpec& spec) {
  return static_cast<std::size_t>(spec.c_out * (spec.c_in / spec.groups) *
                                  spec.kernel * spec.kernel);
}

void check_conv_weights(const ConvWeights& wts, const ConvSpec& spec) {
  if (wts.weight.size() != weight_count(spec)) {
    throw ShapeError("conv weight array has " + std::to_string(wts.weight.size()) +
                     " entries, spec needs " + std::to_string(weight_count(spec)));
  }
  if (!wts.bias.empty() && wts.bias.size() != static_cast<std::size_t>(spec.c_out)) {
    throw ShapeError("conv bias array has " + std::to_string(wts.bias.size()) +
                     " entries, spec needs 0 or " + std::to_string(spec.c_out));
  }
}

void check_forward_shapes(const Tensor4& input, const ConvSpec& spec,
                          std::int64_t* h_out, std::int64_t* w_out) {
  if (input.c() != spec.c_in) {
    throw ShapeError("input has " + std::to_string(input.c()) +
                     " channels, spec expects " + std::to_string(spec.c_in));
  }
  *h_out = conv_output_extent(input.h(), spec.kernel, spec.stride, spec.padding);
  *w_out = conv_output_extent(input.w(), spec.kernel, spec.stride, spec.padding);
  if (*h_out < 1 || *w_out < 1) {
    throw ShapeError("kernel does not fit: output extent would be " +
                     std::to_string(*h_out) + "x" + std::to_string(*w_out));
  }
}

// Padded fetch: out-of-range positions read as an explicit 0.0 that still
// participates in the multiply, so instrumented MAC counts equal the
// closed-form F_out²·c_out·(c_in/groups)·W² exactly.
inline double fetch(const Tensor4& t, std::int64_t n, std::int64_t c, std::int64_t y,
                    std::int64_t x) {
  if (y < 0 || y >= t.h() || x < 0 || x >= t.w()) return 0.0;
  return t.data()[t.index(n, c, y, x)];
}

template <bool kCount>
Tensor4 conv_forward_impl(const Tensor4& input, const ConvWeights& wts,
                          const ConvSpec& spec, std::uint64_t* mac_count) {
  validate_conv_spec(spec);
  check_conv_weights(wts, spec);
  std::int64_t h_out, w_out;
  check_forward_shapes(input, spec, &h_out, &w_out);

  const std::int64_t cig = spec.c_in / spec.groups;   // channels per input group
  const std::int64_t cog = spec.c_out / spec.groups;  // channels per output group
  const std::int64_t kw = spec.kernel;
  Tensor4 out(input.n(), spec.c_out, h_out, w_out);
  const std::int64_t rows = input.n() * spec.c_out;
  const double work = 2.0 * static_cast<double>(h_out * w_out * cig * kw * kw);
  std::uint64_t macs = 0;

  auto row_body = [&](std::int64_t row) {
    const std::int64_t n = row / spec.c_out;
    const std::int64_t oc = row % spec.c_out;
    const std::int64_t g = oc / cog;
    const double* w_base = wts.weight.data() + oc * cig * kw * kw;
    const double b = wts.bias.empty() ? 0.0 : wts.bias[static_cast<std::size_t>(oc)];
    for (std::int64_t oy = 0; oy < h_out; ++oy) {
      for (std::int64_t ox = 0; ox < w_out; ++ox) {
        double sum = b;
        for (std::int64_t a = 0; a < cig; ++a) {
          const std::int64_t ic = g * cig + a;
          const double* w_ch = w_base + a * kw * kw;
          for (std::int64_t i = 0; i < kw; ++i) {
            const std::int64_t iy = oy * spec.stride - spec.padding + i;
            for (std::int64_t j = 0; j < kw; ++j) {
              const std::int64_t ix = ox * spec.stride - spec.padding + j;
              sum += w_ch[i * kw + j] * fetch(input, n, ic, iy, ix);
              if constexpr (kCount) ++macs;
            }
          }
        }
        out.data()[out.index(n, oc, oy, ox)] = sum;
      }
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

ConvWeights conv_weights_filled(const ConvSpec& spec, double weight_value,
                                bool with_bias, double bias_value) {
  validate_conv_spec(spec);
  ConvWeights wts;
  wts.weight.assign(weight_count(spec), weight_value);
  if (with_bias) wts.bias.assign(static_cast<std::size_t>(spec.c_out), bias_value);
  return wts;
}

ConvWeights conv_weights_init(const ConvSpec& spec, bool with_bias, Rng& rng) {
  ConvWeights wts = conv_weights_filled(spec, 0.0, with_bias, 0.0);
  const double fan_in =
      static_cast<double>((spec.c_in / spec.groups) * spec.kernel * spec.kernel);
  const double bound = std::sqrt(1.0 / fan_in);
  for (double& w : wts.weight) w = rng.uniform(-bound, bound);
  return wts;
}

Tensor4 grouped_conv_forward(const Tensor4& input, const ConvWeights& wts,
                             const ConvSpec& spec) {
  return conv_forward_impl<false>(input, wts, spec, nullptr);
}

Tensor4 grouped_conv_forward_counted(const Tensor4& input, const ConvWeights& wts,
                                     const ConvSpec& spec, std::uint64_t* mac_count) {
  return conv_forward_impl<true>(input, wts, spec, mac_count);
}

ConvGradients grouped_conv_backward(const Tensor4& grad_out, const Tensor4& input,
                                    const ConvWeights& wts, const ConvSpec& spec) {
  validate_conv_spec(spec);
  check_conv_weights(wts, spec);
  std::int64_t h_out, w_out;
  check_forward_shapes(input, spec, &h_out, &w_out);
  if (grad_out.n() != input.n() || grad_out.c() != spec.c_out ||
      grad_out.h() != h_out || grad_out.w() != w_out) {
    throw ShapeError("grad_out shape inconsistent with forward output");
  }

  const std::int64_t cig = spec.c_in / spec.groups;
  const std::int64_t cog = spec.c_out / spec.groups;
  const std::int64_t kw = spec.kernel;
  ConvGradients grads;
  grads.grad_input = Tensor4(input.n(), input.c(), input.h(), input.w());
  grads.grad_weight.assign(wts.weight.size(), 0.0);
  if (!wts.bias.empty()) {
    grads.grad_bias.assign(static_cast<std::size_t>(spec.c_out), 0.0);
  }

  // Input gradient, input-centric: each (n, ic) row pulls every (oc, i, j)
  // whose forward window touched it; writes are disjoint by construction.
  const std::int64_t in_rows = input.n() * spec.c_in;
  const double in_work = 2.0 * static_cast<double>(input.h() * input.w() * cog * kw * kw);
  parallel_for(in_rows, in_work, [&](std::int64_t row) {
    const std::int64_t n = row / spec.c_in;
    const std::int64_t ic = row % spec.c_in;
    const std::int64_t g = ic / cig;
    const std::int64_t a = ic % cig;
    for (std::int64_t iy = 0; iy < input.h(); ++iy) {
      for (std::int64_t ix = 0; ix < input.w(); ++ix) {
        double sum = 0.0;
        for (std::int64_t oc = g * cog; oc < (g + 1) * cog; ++oc) {
          const double* w_ch = wts.weight.data() + (oc * cig + a) * kw * kw;
          for (std::int64_t i = 0; i < kw; ++i) {
            const std::int64_t ty = iy + spec.padding - i;
            if (ty < 0 || ty % spec.stride != 0) continue;
            const std::int64_t oy = ty / spec.stride;
            if (oy >= h_out) continue;
            for (std::int64_t j = 0; j < kw; ++j) {
              const std::int64_t tx = ix + spec.padding - j;
              if (tx < 0 || tx % spec.stride != 0) continue;
              const std::int64_t ox = tx / spec.stride;
              if (ox >= w_out) continue;
              sum += w_ch[i * kw + j] *
                     grad_out.data()[grad_out.index(n, oc, oy, ox)];
            }
          }
        }
        grads.grad_input.data()[grads.grad_input.index(n, ic, iy, ix)] = sum;
      }
    }
  });

  // Weight and bias gradients: one worker per output channel owns that
  // channel's weight slots and bias entry; reductions run in fixed
  // (n, oy, ox) order.
  const double w_work =
      2.0 * static_cast<double>(input.n() * h_out * w_out * (cig * kw * kw + 1));
  parallel_for(spec.c_out, w_work, [&](std::int64_t oc) {
    const std::int64_t g = oc / cog;
    for (std::int64_t a = 0; a < cig; ++a) {
      const std::int64_t ic = g * cig + a;
      for (std::int64_t i = 0; i < kw; ++i) {
        for (std::int64_t j = 0; j < kw; ++j) {
          double sum = 0.0;
          for (std::int64_t n = 0; n < input.n(); ++n) {
            for (std::int64_t oy = 0; oy < h_out; ++oy) {
              const std::int64_t iy = oy * spec.stride - spec.padding + i;
              for (std::int64_t ox = 0; ox < w_out; ++ox) {
                const std::int64_t ix = ox * spec.stride - spec.padding + j;
                sum += grad_out.data()[grad_out.index(n, oc, oy, ox)] *
                       fetch(input, n, ic, iy, ix);
              }
            }
          }
          grads.grad_weight[static_cast<std::size_t>((oc * cig + a) * kw * kw +
                                                     i * kw + j)] = sum;
        }
      }
    }
    if (!grads.grad_bias.empty()) {
      double sum = 0.0;
      for (std::int64_t n = 0; n < input.n(); ++n) {
        const double* gp = grad_out.data() + grad_out.index(n, oc, 0, 0);
        for (std::int64_t p = 0; p < h_out * w_out; ++p) sum += gp[p];
      }
      grads.grad_bias[static_cast<std::size_t>(oc)] = sum;
    }
  });
  return grads;
}

namespace {

void check_scc_forward_args(const Tensor4& input, const SccWeights& wts,
                            const SccConfig& cfg) {
  if (input.c() != cfg.c_in) {
    throw ShapeError("input has " + std::to_string(input.c()) +
                     " channels, config expects " + std::to_string(cfg.c_in));
  }
  if (wts.weight.size() != static_cast<std::size_t>(cfg.c_out * cfg.group_width)) {
    throw ShapeError("weight array size does not match config");
  }
  if (wts.bias.size() !=
      (cfg.has_bias ? static_cast<std::size_t>(cfg.c_out) : std::size_t{0})) {
    throw ShapeError("bias array size does not match config");
  }
}

/// Stacked tensor of every filter's window, channels ordered
/// [oc=0 window][oc=1 window]…; with use_cc only the first cycle's windows
/// are sliced, then whole cycles are block-copied, truncating the tail cycle
/// when cyclic_dist does not divide c_out. Both paths produce identical
/// bytes; they differ in how much slicing work and auxiliary storage the
/// construction takes, which is what stats records.
Tensor4 build_channel_stack(const Tensor4& input, const SccConfig& cfg,
                            const ChannelCycle& cycle, bool use_cc,
                            CompositionStats* stats) {
  const std::int64_t gw = cfg.group_width;
  if (!use_cc) {
    std::vector<Tensor4> parts;
    parts.reserve(static_cast<std::size_t>(cfg.c_out));
    for (std::int64_t oc = 0; oc < cfg.c_out; ++oc) {
      parts.push_back(slice_channels_cyclic(input, window_of(cycle, oc).start, gw));
    }
    stats->aux_channels_stored = cfg.c_out * gw;
    stats->aux_bytes = stats->aux_channels_stored * input.n() * input.h() *
                       input.w() * static_cast<std::int64_t>(sizeof(double));
    return concat_channels(parts);
  }

  std::vector<Tensor4> first_cycle;
  first_cycle.reserve(static_cast<std::size_t>(cycle.cyclic_dist));
  for (std::int64_t d = 0; d < cycle.cyclic_dist; ++d) {
    first_cycle.push_back(
        slice_channels_cyclic(input, cycle.windows[static_cast<std::size_t>(d)].start, gw));
  }
  const Tensor4 cycle_block = concat_channels(first_cycle);
  stats->aux_channels_stored = cycle.cyclic_dist * gw;
  stats->aux_bytes = stats->aux_channels_stored * input.n() * input.h() * input.w() *
                     static_cast<std::int64_t>(sizeof(double));

  const std::int64_t total_c = cfg.c_out * gw;
  const std::int64_t block_c = cycle_block.c();
  Tensor4 stacked(input.n(), total_c, input.h(), input.w());
  const std::int64_t plane = input.h() * input.w();
  for (std::int64_t n = 0; n < input.n(); ++n) {
    std::int64_t done = 0;
    while (done < total_c) {
      const std::int64_t chunk = std::min(block_c, total_c - done);
      std::memcpy(stacked.data() + stacked.index(n, done, 0, 0),
                  cycle_block.data() + cycle_block.index(n, 0, 0, 0),
                  static_cast<std::size_t>(chunk * plane) * sizeof(double));
      done += chunk;
    }
  }
  return stacked;
}

ConvSpec channel_stack_conv_spec(const SccConfig& cfg) {
  ConvSpec spec;
  spec.c_in = cfg.c_out * cfg.group_width;
  spec.c_out = cfg.c_out;
  spec.kernel = 1;
  spec.stride = 1;
  spec.padding = 0;
  spec.groups = cfg.c_out;
  return spec;
}

ConvWeights as_grouped_weights(const SccWeights& wts) {
  // SCC weight [oc][k] and the grouped 1×1 weight [oc][a][0][0] share the
  // same flat layout, so the copy is direct.
  return ConvWeights{wts.weight, wts.bias};
}

}  // namespace

CompositionResult scc_channel_stack_forward(const Tensor4& input, const SccWeights& wts,
                                            const SccConfig& cfg, bool use_cc) {
  check_scc_forward_args(input, wts, cfg);
  const ChannelCycle cycle = compute_channel_cycle(cfg);
  CompositionResult result;
  const Tensor4 stacked = build_channel_stack(input, cfg, cycle, use_cc, &result.stats);
  result.output =
      grouped_conv_forward(stacked, as_grouped_weights(wts), channel_stack_conv_spec(cfg));
  return result;
}

SccGradients scc_channel_stack_backward(const Tensor4& grad_out, const Tensor4& input,
                                        const SccWeights& wts, const SccConfig& cfg,
                                        bool use_cc) {
  check_scc_forward_args(input, wts, cfg);
  if (grad_out.c() != cfg.c_out || grad_out.n() != input.n() ||
      grad_out.h() != input.h() || grad_out.w() != input.w()) {
    throw ShapeError("grad_out shape inconsistent with forward output");
  }
  const ChannelCycle cycle = compute_channel_cycle(cfg);
  CompositionStats stats;
  const Tensor4 stacked = build_channel_stack(input, cfg, cycle, use_cc, &stats);
  ConvGradients conv_grads = grouped_conv_backward(
      grad_out, stacked, as_grouped_weights(wts), channel_stack_conv_spec(cfg));

  // Scatter the stacked-tensor gradient back through the slicing: stacked
  // channel oc·gw + k came from input channel (start_oc + k) mod c_in.
  SccGradients grads;
  grads.grad_input = Tensor4(input.n(), input.c(), input.h(), input.w());
  const std::int64_t plane = input.h() * input.w();
  for (std::int64_t n = 0; n < input.n(); ++n) {
    for (std::int64_t oc = 0; oc < cfg.c_out; ++oc) {
      const std::int64_t start = window_of(cycle, oc).start;
      for (std::int64_t k = 0; k < cfg.group_width; ++k) {
        const std::int64_t ic = (start + k) % cfg.c_in;
        const double* src = conv_grads.grad_input.data() +
                            conv_grads.grad_input.index(n, oc * cfg.group_width + k, 0, 0);
        double* dst = grads.grad_input.data() + grads.grad_input.index(n, ic, 0, 0);
        for (std::int64_t p = 0; p < plane; ++p) dst[p] += src[p];
      }
    }
  }
  grads.params.grad_weight = std::move(conv_grads.grad_weight);
  grads.params.grad_bias = std::move(conv_grads.grad_bias);
  return grads;
}

namespace {

/// The window slices the conv-stack route materializes: one per filter
/// without CC, one per distinct window with CC (filters then share by
/// oc mod cyclic_dist).
std::vector<Tensor4> build_window_slices(const Tensor4& input, const SccConfig& cfg,
                                         const ChannelCycle& cycle, bool use_cc,
                                         CompositionStats* stats) {
  const std::int64_t count = use_cc ? cycle.cyclic_dist : cfg.c_out;
  std::vector<Tensor4> slices;
  slices.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    slices.push_back(
        slice_channels_cyclic(input, window_of(cycle, i).start, cfg.group_width));
  }
  stats->aux_channels_stored = count * cfg.group_width;
  stats->aux_bytes = stats->aux_channels_stored * input.n() * input.h() * input.w() *
                     static_cast<std::int64_t>(sizeof(double));
  return slices;
}

ConvSpec per_filter_conv_spec(const SccConfig& cfg) {
  ConvSpec spec;
  spec.c_in = cfg.group_width;
  spec.c_out = 1;
  spec.kernel = 1;
  spec.stride = 1;
  spec.padding = 0;
  spec.groups = 1;
  return spec;
}

ConvWeights per_filter_weights(const SccWeights& wts, const SccConfig& cfg,
                               std::int64_t oc) {
  ConvWeights w;
  const double* row = wts.weight.data() + oc * cfg.group_width;
  w.weight.assign(row, row + cfg.group_width);
  if (!wts.bias.empty()) w.bias.assign(1, wts.bias[static_cast<std::size_t>(oc)]);
  return w;
}

}  // namespace

CompositionResult scc_conv_stack_forward(const Tensor4& input, const SccWeights& wts,
                                         const SccConfig& cfg, bool use_cc) {
  check_scc_forward_args(input, wts, cfg);
  const ChannelCycle cycle = compute_channel_cycle(cfg);
  CompositionResult result;
  const std::vector<Tensor4> slices =
      build_window_slices(input, cfg, cycle, use_cc, &result.stats);
  const ConvSpec spec = per_filter_conv_spec(cfg);

  std::vector<Tensor4> outputs;
  outputs.reserve(static_cast<std::size_t>(cfg.c_out));
  for (std::int64_t oc = 0; oc < cfg.c_out; ++oc) {
    const Tensor4& slice =
        slices[static_cast<std::size_t>(use_cc ? oc % cycle.cyclic_dist : oc)];
    outputs.push_back(grouped_conv_forward(slice, per_filter_weights(wts, cfg, oc), spec));
  }
  result.output = concat_channels(outputs);
  return result;
}

SccGradients scc_conv_stack_backward(const Tensor4& grad_out, const Tensor4& input,
                                     const SccWeights& wts, const SccConfig& cfg,
                                     bool use_cc) {
  check_scc_forward_args(input, wts, cfg);
  if (grad_out.c() != cfg.c_out || grad_out.n() != input.n() ||
      grad_out.h() != input.h() || grad_out.w() != input.w()) {
    throw ShapeError("grad_out shape inconsistent with forward output");
  }
  const ChannelCycle cycle = compute_channel_cycle(cfg);
  CompositionStats stats;
  const std::vector<Tensor4> slices =
      build_window_slices(input, cfg, cycle, use_cc, &stats);
  const ConvSpec spec = per_filter_conv_spec(cfg);

  SccGradients grads;
  grads.grad_input = Tensor4(input.n(), input.c(), input.h(), input.w());
  grads.params.grad_weight.assign(wts.weight.size(), 0.0);
  if (!wts.bias.empty()) {
    grads.params.grad_bias.assign(static_cast<std::size_t>(cfg.c_out), 0.0);
  }
  const std::int64_t plane = input.h() * input.w();
  for (std::int64_t oc = 0; oc < cfg.c_out; ++oc) {
    const Tensor4& slice =
        slices[static_cast<std::size_t>(use_cc ? oc % cycle.cyclic_dist : oc)];
    const Tensor4 g_slice = slice_channels_cyclic(grad_out, oc, 1);
    const ConvGradients cg =
        grouped_conv_backward(g_slice, slice, per_filter_weights(wts, cfg, oc), spec);

    const std::int64_t start = window_of(cycle, oc).start;
    for (std::int64_t n = 0; n < input.n(); ++n) {
      for (std::int64_t k = 0; k < cfg.group_width; ++k) {
        const std::int64_t ic = (start + k) % cfg.c_in;
        const double* src = cg.grad_input.data() + cg.grad_input.index(n, k, 0, 0);
        double* dst = grads.grad_input.data() + grads.grad_input.index(n, ic, 0, 0);
        for (std::int64_t p = 0; p < plane; ++p) dst[p] += src[p];
      }
    }
    std::memcpy(grads.params.grad_weight.data() + oc * cfg.group_width,
                cg.grad_weight.data(),
                static_cast<std::size_t>(cfg.group_width) * sizeof(double));
    if (!grads.params.grad_bias.empty()) {
      grads.params.grad_bias[static_cast<std::size_t>(oc)] = cg.grad_bias[0];
    }
  }
  return grads;
}

}  // namespace sccl
