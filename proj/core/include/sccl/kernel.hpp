#pragma once

#include <cstdint>
#include <vector>

#include "sccl/config.hpp"
#include "sccl/cycle.hpp"
#include "sccl/rng.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

/// Sliding-channel convolution parameters. weight is indexed [oc][k] with k
/// in [0, group_width); slot k of filter oc binds to input channel
/// (window_of(oc).start + k) mod c_in, so the array stays rectangular and
/// oblivious to window wrap-around. bias has length c_out and is present
/// exactly when the config carries bias.
struct SccWeights {
  std::vector<double> weight;
  std::vector<double> bias;
};

/// Weight/bias gradients, shaped exactly like their primals.
struct SccParamGradients {
  std::vector<double> grad_weight;
  std::vector<double> grad_bias;
};

/// Full gradient triple of one operator application.
struct SccGradients {
  Tensor4 grad_input;
  SccParamGradients params;
};

/// Weights with every slot = weight_value and (when cfg.has_bias) every bias
/// = bias_value.
SccWeights scc_weights_filled(const SccConfig& cfg, double weight_value,
                              double bias_value = 0.0);

/// Fan-in-scaled init: weights uniform in ±sqrt(1/group_width), biases zero.
SccWeights scc_weights_init(const SccConfig& cfg, Rng& rng);

/// Forward pass, output-centric: out[n, oc, y, x] = bias[oc] +
/// Σ_k weight[oc][k] · in[n, (start_oc + k) mod c_in, y, x]. The operator is
/// 1×1, stride 1, no padding, so spatial extents are preserved. Work is
/// partitioned by output element with disjoint writes; per-element summation
/// order is fixed (k ascending), so results are bit-identical regardless of
/// worker count.
Tensor4 scc_forward(const Tensor4& input, const SccWeights& wts, const SccConfig& cfg);

/// Forward pass that also counts every scalar multiply executed; runs
/// single-threaded. Produces the same bits as scc_forward.
Tensor4 scc_forward_counted(const Tensor4& input, const SccWeights& wts,
                            const SccConfig& cfg, std::uint64_t* mac_count);

/// Input gradient, input-centric: each grad_input element pulls
/// weight[oc][(ic - start_oc) mod c_in] · grad_out[n, oc, y, x] over the
/// filters oc whose window covers ic (ascending). One worker owns each input
/// element; no shared-write accumulation anywhere in the pass.
Tensor4 scc_backward_input(const Tensor4& grad_out, const SccWeights& wts,
                           const SccConfig& cfg);

/// Parameter gradients: grad_weight[oc][k] = Σ_{n,y,x} grad_out[n, oc, y, x]
/// · input[n, (start_oc + k) mod c_in, y, x]; grad_bias[oc] = Σ_{n,y,x}
/// grad_out[n, oc, y, x]. Each weight slot (and each bias entry) is reduced
/// sequentially in (n, y, x) order by a single worker.
SccParamGradients scc_backward_params(const Tensor4& grad_out, const Tensor4& input,
                                      const SccConfig& cfg);

/// Convenience wrapper running both backward passes.
SccGradients scc_backward(const Tensor4& grad_out, const Tensor4& input,
                          const SccWeights& wts, const SccConfig& cfg);

}  // namespace sccl
