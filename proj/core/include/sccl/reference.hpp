#pragma once

#include <cstdint>
#include <vector>

#include "sccl/config.hpp"
#include "sccl/kernel.hpp"
#include "sccl/rng.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

/// Geometry of a grouped convolution. groups=1 is the standard convolution,
/// groups=c_in (one filter per channel) is depthwise, kernel=1 with groups=1
/// is pointwise, kernel=1 with groups>1 is group-pointwise.
struct ConvSpec {
  std::int64_t c_in = 0;
  std::int64_t c_out = 0;
  std::int64_t kernel = 1;   // square spatial size W
  std::int64_t stride = 1;
  std::int64_t padding = 0;  // symmetric zero padding
  std::int64_t groups = 1;
};

/// Convolution parameters: weight indexed [oc][a][i][j] with a in
/// [0, c_in/groups) and i, j in [0, kernel); bias empty or length c_out.
struct ConvWeights {
  std::vector<double> weight;
  std::vector<double> bias;
};

/// Gradient triple of one grouped-convolution application.
struct ConvGradients {
  Tensor4 grad_input;
  std::vector<double> grad_weight;
  std::vector<double> grad_bias;
};

/// How much intermediate feature-map storage a composition materialized.
struct CompositionStats {
  std::int64_t aux_channels_stored = 0;
  std::int64_t aux_bytes = 0;  // aux_channels_stored · n · h · w · sizeof(double)
};

/// Composition output plus its storage stats.
struct CompositionResult {
  Tensor4 output;
  CompositionStats stats;
};

/// Output spatial extent: floor((in + 2·padding - kernel) / stride) + 1.
std::int64_t conv_output_extent(std::int64_t in, std::int64_t kernel,
                                std::int64_t stride, std::int64_t padding);

/// Throws ConfigError unless groups divide both channel counts and all
/// geometry fields are in range.
void validate_conv_spec(const ConvSpec& spec);

/// Weights with every entry = weight_value; bias (every entry = bias_value)
/// is attached only when with_bias.
ConvWeights conv_weights_filled(const ConvSpec& spec, double weight_value,
                                bool with_bias, double bias_value = 0.0);

/// Fan-in-scaled init: uniform in ±sqrt(1/((c_in/groups)·kernel²)), bias zero.
ConvWeights conv_weights_init(const ConvSpec& spec, bool with_bias, Rng& rng);

/// Direct (naive loop) grouped convolution with explicit zero padding. Group
/// g maps input channels [g·c_in/groups, (g+1)·c_in/groups) to output
/// channels [g·c_out/groups, (g+1)·c_out/groups). Work partitioned by output
/// element, fixed summation order, deterministic across worker counts.
Tensor4 grouped_conv_forward(const Tensor4& input, const ConvWeights& wts,
                             const ConvSpec& spec);

/// Same result, single-threaded, counting every scalar multiply executed
/// (padding positions fetch an explicit 0.0 and are still multiplied, so the
/// count matches the closed-form MAC formulas exactly).
Tensor4 grouped_conv_forward_counted(const Tensor4& input, const ConvWeights& wts,
                                     const ConvSpec& spec, std::uint64_t* mac_count);

/// Exact adjoints of grouped_conv_forward. grad_input is computed
/// input-centrically (each element pulls its contributions), grad_weight per
/// weight slot, grad_bias per output channel — all with disjoint writes.
ConvGradients grouped_conv_backward(const Tensor4& grad_out, const Tensor4& input,
                                    const ConvWeights& wts, const ConvSpec& spec);

/// Composition oracle #1 — concatenate-then-convolve: stacks every filter's
/// input window into one wide tensor, then runs a single grouped 1×1
/// convolution with groups=c_out. With use_cc, only the first cycle's
/// windows are materialized and whole cycles are replicated (a partial final
/// cycle is truncated); stats report channels materialized before
/// replication. Output equals scc_forward bit for bit.
CompositionResult scc_channel_stack_forward(const Tensor4& input, const SccWeights& wts,
                                            const SccConfig& cfg, bool use_cc);

/// Gradients via the channel-stack route (rebuilds the stacked tensor, runs
/// the grouped-conv backward, scatters the stacked gradient onto the input
/// channels). Mathematically identical to scc_backward.
SccGradients scc_channel_stack_backward(const Tensor4& grad_out, const Tensor4& input,
                                        const SccWeights& wts, const SccConfig& cfg,
                                        bool use_cc);

/// Composition oracle #2 — convolve-then-concatenate: slices each filter's
/// window, applies a one-output-channel 1×1 convolution, concatenates the
/// c_out results. With use_cc, only the first cycle's cyclic_dist slices are
/// materialized and filter oc reuses slice (oc mod cyclic_dist). Output
/// equals scc_forward bit for bit.
CompositionResult scc_conv_stack_forward(const Tensor4& input, const SccWeights& wts,
                                         const SccConfig& cfg, bool use_cc);

/// Gradients via the conv-stack route. Mathematically identical to
/// scc_backward.
SccGradients scc_conv_stack_backward(const Tensor4& grad_out, const Tensor4& input,
                                     const SccWeights& wts, const SccConfig& cfg,
                                     bool use_cc);

}  // namespace sccl
