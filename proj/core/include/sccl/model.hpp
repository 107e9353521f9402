#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "sccl/config.hpp"
#include "sccl/cost.hpp"
#include "sccl/kernel.hpp"
#include "sccl/reference.hpp"
#include "sccl/rng.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

/// One layer line of a model spec file.
struct LayerRecord {
  LayerKind kind = LayerKind::kStandard;
  std::int64_t c_in = 0;
  std::int64_t c_out = 0;
  std::int64_t kernel = 1;
  std::int64_t stride = 1;
  std::int64_t cg = 1;
  Overlap co = Overlap::channels(0);
  bool relu = true;  // activation: "relu" (default) or "none"
};

/// Classifier head: global average pool then one dense layer.
struct HeadRecord {
  std::int64_t classes = 0;
};

/// Parsed model spec document.
struct ModelSpec {
  std::vector<LayerRecord> layers;
  HeadRecord head;
};

/// Parses the JSON model document:
///   {"layers": [{"kind": "dsc_block", "c_in": 4, "c_out": 8, "kernel": 3,
///                "stride": 1, "cg": 2, "co": "50%", "activation": "relu"},
///               ...],
///    "head": {"pool": "global-average", "classes": 4}}
/// kind ∈ {standard, depthwise, pointwise, group_pointwise, scc, dsc_block};
/// co accepts "50%", 0.5, or an integer channel count. Throws SpecError with
/// the parser's line/column diagnostics on malformed JSON, and on missing or
/// ill-typed fields, channel-incompatible adjacent layers, or an unsupported
/// pool.
ModelSpec parse_model_spec(std::istream& in);
ModelSpec parse_model_spec_file(const std::string& path);

/// Cost-model view of a spec: per-layer LayerSpec list with spatial extents
/// propagated from the given input extent.
std::vector<LayerSpec> model_cost_layers(const ModelSpec& spec,
                                         std::int64_t input_spatial,
                                         bool count_bias);

/// One executable stage: either a grouped convolution or an SCC operator,
/// optionally followed by ReLU.
struct ConvStage {
  ConvSpec spec;
  ConvWeights wts;
};

struct SccStage {
  SccConfig cfg;
  SccWeights wts;
};

struct Stage {
  std::variant<ConvStage, SccStage> op;
  bool relu = true;
};

/// Dense layer mapping pooled channel means to class logits.
struct DenseHead {
  std::int64_t in_features = 0;
  std::int64_t classes = 0;
  std::vector<double> weight;  // [class][feature]
  std::vector<double> bias;    // [class]
};

/// Everything the backward pass needs from a forward pass.
struct NetworkTrace {
  std::vector<Tensor4> stage_inputs;   // input tensor of each stage
  std::vector<Tensor4> stage_preact;   // stage output before ReLU
  std::vector<double> pooled;          // [n][feature] global averages
  std::vector<double> logits;          // [n][class]
  std::int64_t batch = 0;
};

/// Per-stage parameter gradients; weight/bias layouts mirror the stage's own
/// parameter arrays (and the head's).
struct ParamGrads {
  std::vector<double> weight;
  std::vector<double> bias;
};

struct NetworkGradients {
  std::vector<ParamGrads> stages;
  ParamGrads head;
};

/// A runnable forward/backward pipeline built from a ModelSpec. DscBlock
/// records expand to a depthwise stage (padding floor(W/2), no activation in
/// between) followed by an SCC stage; ReLU applies after each record's last
/// stage. Head: global average pool, dense layer, softmax cross-entropy loss
/// (applied by the training loop, not the network).
class Network {
 public:
  std::vector<Stage> stages;
  DenseHead head;

  /// Class-logit rows for a batch; fills trace when given (needed for
  /// backward). Throws ShapeError on a channel-incompatible input.
  std::vector<double> forward(const Tensor4& input, NetworkTrace* trace = nullptr) const;

  /// Gradients of all parameters and nothing else (the dataset is fixed);
  /// grad_logits is ∂loss/∂logits row-major [n][class].
  NetworkGradients backward(const NetworkTrace& trace,
                            const std::vector<double>& grad_logits) const;

  /// Plain SGD update: p -= lr · g on every parameter.
  void apply_sgd(const NetworkGradients& grads, double learning_rate);

  std::int64_t input_channels() const;
  std::int64_t classes() const { return head.classes; }
};

/// Instantiates the network with fan-in-scaled uniform weights and zero
/// biases, deterministically from seed. Throws SpecError/ConfigError on
/// invalid specs (channel mismatches, cg not dividing c_in).
Network build_network(const ModelSpec& spec, std::uint64_t seed);

}  // namespace sccl
