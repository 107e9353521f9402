#include "sccl/model.hpp"

#include <cmath>
#include <fstream>
#include <type_traits>
#include <utility>

#include <json.hpp>

#include "sccl/errors.hpp"

namespace sccl {

namespace {

using nlohmann::json;

LayerKind parse_kind(const std::string& name) {
  if (name == "standard") return LayerKind::kStandard;
  if (name == "depthwise") return LayerKind::kDepthwise;
  if (name == "pointwise") return LayerKind::kPointwise;
  if (name == "group_pointwise") return LayerKind::kGroupPointwise;
  if (name == "scc") return LayerKind::kScc;
  if (name == "dsc_block") return LayerKind::kDscBlock;
  throw SpecError("unknown layer kind '" + name + "'");
}

std::int64_t require_count(const json& layer, const char* key, std::int64_t index) {
  if (!layer.contains(key) || !layer[key].is_number_integer()) {
    throw SpecError("layer " + std::to_string(index) + ": field '" + key +
                    "' must be an integer");
  }
  return layer[key].get<std::int64_t>();
}

std::int64_t optional_count(const json& layer, const char* key, std::int64_t fallback,
                            std::int64_t index) {
  if (!layer.contains(key)) return fallback;
  if (!layer[key].is_number_integer()) {
    throw SpecError("layer " + std::to_string(index) + ": field '" + key +
                    "' must be an integer");
  }
  return layer[key].get<std::int64_t>();
}

Overlap parse_overlap_field(const json& value, std::int64_t index) {
  if (value.is_string()) return Overlap::parse(value.get<std::string>());
  if (value.is_number_integer()) return Overlap::channels(value.get<std::int64_t>());
  if (value.is_number_float()) return Overlap::ratio(value.get<double>());
  throw SpecError("layer " + std::to_string(index) +
                  ": field 'co' must be a string, integer, or fraction");
}

}  // namespace

ModelSpec parse_model_spec(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    // The parser's message carries line/column diagnostics.
    throw SpecError(std::string("model spec: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    throw SpecError("model spec: top level must be an object with a 'layers' array");
  }

  ModelSpec spec;
  std::int64_t index = 0;
  for (const json& layer : doc["layers"]) {
    if (!layer.is_object()) {
      throw SpecError("layer " + std::to_string(index) + ": must be an object");
    }
    LayerRecord rec;
    if (!layer.contains("kind") || !layer["kind"].is_string()) {
      throw SpecError("layer " + std::to_string(index) + ": field 'kind' must be a string");
    }
    rec.kind = parse_kind(layer["kind"].get<std::string>());
    rec.c_in = require_count(layer, "c_in", index);
    rec.c_out = require_count(layer, "c_out", index);
    rec.kernel = optional_count(layer, "kernel", 1, index);
    rec.stride = optional_count(layer, "stride", 1, index);
    rec.cg = optional_count(layer, "cg", 1, index);
    if (layer.contains("co")) rec.co = parse_overlap_field(layer["co"], index);
    if (layer.contains("activation")) {
      if (!layer["activation"].is_string()) {
        throw SpecError("layer " + std::to_string(index) +
                        ": field 'activation' must be a string");
      }
      const std::string act = layer["activation"].get<std::string>();
      if (act == "relu") {
        rec.relu = true;
      } else if (act == "none") {
        rec.relu = false;
      } else {
        throw SpecError("layer " + std::to_string(index) + ": unknown activation '" +
                        act + "'");
      }
    }
    if (rec.kind == LayerKind::kDepthwise && rec.c_out != rec.c_in) {
      throw SpecError("layer " + std::to_string(index) +
                      ": depthwise layers need c_out = c_in");
    }
    if (!spec.layers.empty() && spec.layers.back().c_out != rec.c_in) {
      throw SpecError("layer " + std::to_string(index) + ": c_in=" +
                      std::to_string(rec.c_in) + " does not match previous c_out=" +
                      std::to_string(spec.layers.back().c_out));
    }
    spec.layers.push_back(rec);
    ++index;
  }
  if (spec.layers.empty()) throw SpecError("model spec: 'layers' must be non-empty");

  if (!doc.contains("head") || !doc["head"].is_object()) {
    throw SpecError("model spec: missing 'head' object");
  }
  const json& head = doc["head"];
  if (!head.contains("pool") || !head["pool"].is_string() ||
      head["pool"].get<std::string>() != "global-average") {
    throw SpecError("model spec: head 'pool' must be \"global-average\"");
  }
  if (!head.contains("classes") || !head["classes"].is_number_integer()) {
    throw SpecError("model spec: head 'classes' must be an integer");
  }
  spec.head.classes = head["classes"].get<std::int64_t>();
  if (spec.head.classes < 2) throw SpecError("model spec: head needs >= 2 classes");
  return spec;
}

ModelSpec parse_model_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open model spec '" + path + "'");
  return parse_model_spec(in);
}

std::vector<LayerSpec> model_cost_layers(const ModelSpec& spec,
                                         std::int64_t input_spatial, bool count_bias) {
  std::vector<LayerSpec> layers;
  std::int64_t f = input_spatial;
  for (const LayerRecord& rec : spec.layers) {
    LayerSpec ls;
    ls.kind = rec.kind;
    ls.c_in = rec.c_in;
    ls.c_out = rec.c_out;
    ls.kernel = rec.kernel;
    ls.stride = rec.stride;
    ls.spatial = f;
    ls.cg = rec.cg;
    ls.count_bias = count_bias;
    layers.push_back(ls);
    f = layer_output_extent(ls);
  }
  return layers;
}

namespace {

Stage make_conv_stage(const LayerRecord& rec, std::int64_t groups, std::int64_t kernel,
                      std::int64_t padding, bool relu, Rng& rng) {
  ConvSpec spec;
  spec.c_in = rec.c_in;
  spec.c_out = rec.kind == LayerKind::kDepthwise || rec.kind == LayerKind::kDscBlock
                   ? rec.c_in
                   : rec.c_out;
  spec.kernel = kernel;
  spec.stride = rec.stride;
  spec.padding = padding;
  spec.groups = groups;
  ConvWeights wts = conv_weights_init(spec, /*with_bias=*/true, rng);
  return Stage{ConvStage{spec, std::move(wts)}, relu};
}

Stage make_scc_stage(std::int64_t c_in, std::int64_t c_out, std::int64_t cg,
                     const Overlap& co, bool relu, Rng& rng) {
  const SccConfig cfg = scc_config_new(c_in, c_out, cg, co, /*has_bias=*/true);
  SccWeights wts = scc_weights_init(cfg, rng);
  return Stage{SccStage{cfg, std::move(wts)}, relu};
}

void relu_inplace(Tensor4& t) {
  double* p = t.data();
  const std::int64_t count = t.size();
  for (std::int64_t i = 0; i < count; ++i) {
    if (p[i] < 0.0) p[i] = 0.0;
  }
}

}  // namespace

Network build_network(const ModelSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Network net;
  for (const LayerRecord& rec : spec.layers) {
    switch (rec.kind) {
      case LayerKind::kStandard:
        net.stages.push_back(
            make_conv_stage(rec, 1, rec.kernel, rec.kernel / 2, rec.relu, rng));
        break;
      case LayerKind::kDepthwise:
        net.stages.push_back(
            make_conv_stage(rec, rec.c_in, rec.kernel, rec.kernel / 2, rec.relu, rng));
        break;
      case LayerKind::kPointwise:
        net.stages.push_back(make_conv_stage(rec, 1, 1, 0, rec.relu, rng));
        break;
      case LayerKind::kGroupPointwise:
        net.stages.push_back(make_conv_stage(rec, rec.cg, 1, 0, rec.relu, rng));
        break;
      case LayerKind::kScc:
        net.stages.push_back(
            make_scc_stage(rec.c_in, rec.c_out, rec.cg, rec.co, rec.relu, rng));
        break;
      case LayerKind::kDscBlock:
        // Depthwise spatial stage, then the SCC channel-mixing stage;
        // activation only after the pair.
        net.stages.push_back(make_conv_stage(rec, rec.c_in, rec.kernel, rec.kernel / 2,
                                             /*relu=*/false, rng));
        net.stages.push_back(
            make_scc_stage(rec.c_in, rec.c_out, rec.cg, rec.co, rec.relu, rng));
        break;
    }
  }

  net.head.in_features = spec.layers.back().c_out;
  net.head.classes = spec.head.classes;
  net.head.weight.resize(
      static_cast<std::size_t>(net.head.classes * net.head.in_features));
  net.head.bias.assign(static_cast<std::size_t>(net.head.classes), 0.0);
  const double bound = std::sqrt(1.0 / static_cast<double>(net.head.in_features));
  for (double& w : net.head.weight) w = rng.uniform(-bound, bound);
  return net;
}

std::int64_t Network::input_channels() const {
  if (stages.empty()) throw SpecError("network has no stages");
  return std::visit(
      [](const auto& op) -> std::int64_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(op)>, ConvStage>) {
          return op.spec.c_in;
        } else {
          return op.cfg.c_in;
        }
      },
      stages.front().op);
}

std::vector<double> Network::forward(const Tensor4& input, NetworkTrace* trace) const {
  if (input.c() != input_channels()) {
    throw ShapeError("network expects " + std::to_string(input_channels()) +
                     " input channels, got " + std::to_string(input.c()));
  }
  if (trace) {
    trace->stage_inputs.clear();
    trace->stage_preact.clear();
    trace->batch = input.n();
  }

  Tensor4 x = input;
  for (const Stage& stage : stages) {
    if (trace) trace->stage_inputs.push_back(x);
    Tensor4 y = std::visit(
        [&x](const auto& op) {
          if constexpr (std::is_same_v<std::decay_t<decltype(op)>, ConvStage>) {
            return grouped_conv_forward(x, op.wts, op.spec);
          } else {
            return scc_forward(x, op.wts, op.cfg);
          }
        },
        stage.op);
    if (trace) trace->stage_preact.push_back(y);
    if (stage.relu) relu_inplace(y);
    x = std::move(y);
  }

  const std::int64_t nb = x.n();
  const std::int64_t features = x.c();
  const std::int64_t plane = x.h() * x.w();
  std::vector<double> pooled(static_cast<std::size_t>(nb * features));
  for (std::int64_t n = 0; n < nb; ++n) {
    for (std::int64_t ch = 0; ch < features; ++ch) {
      const double* p = x.data() + x.index(n, ch, 0, 0);
      double sum = 0.0;
      for (std::int64_t i = 0; i < plane; ++i) sum += p[i];
      pooled[static_cast<std::size_t>(n * features + ch)] =
          sum / static_cast<double>(plane);
    }
  }

  std::vector<double> logits(static_cast<std::size_t>(nb * head.classes));
  for (std::int64_t n = 0; n < nb; ++n) {
    for (std::int64_t k = 0; k < head.classes; ++k) {
      double sum = head.bias[static_cast<std::size_t>(k)];
      const double* w_row = head.weight.data() + k * head.in_features;
      const double* p_row = pooled.data() + n * features;
      for (std::int64_t ch = 0; ch < features; ++ch) sum += w_row[ch] * p_row[ch];
      logits[static_cast<std::size_t>(n * head.classes + k)] = sum;
    }
  }
  if (trace) {
    trace->pooled = pooled;
    trace->logits = logits;
  }
  return logits;
}

NetworkGradients Network::backward(const NetworkTrace& trace,
                                   const std::vector<double>& grad_logits) const {
  const std::int64_t nb = trace.batch;
  const std::int64_t features = head.in_features;
  if (grad_logits.size() != static_cast<std::size_t>(nb * head.classes)) {
    throw ShapeError("grad_logits size does not match trace batch");
  }
  if (trace.stage_preact.size() != stages.size()) {
    throw ShapeError("trace does not match network stage count");
  }

  NetworkGradients grads;
  grads.stages.resize(stages.size());

  grads.head.weight.assign(head.weight.size(), 0.0);
  grads.head.bias.assign(head.bias.size(), 0.0);
  std::vector<double> grad_pooled(static_cast<std::size_t>(nb * features), 0.0);
  for (std::int64_t n = 0; n < nb; ++n) {
    for (std::int64_t k = 0; k < head.classes; ++k) {
      const double g = grad_logits[static_cast<std::size_t>(n * head.classes + k)];
      const double* p_row = trace.pooled.data() + n * features;
      double* gw_row = grads.head.weight.data() + k * features;
      const double* w_row = head.weight.data() + k * features;
      for (std::int64_t ch = 0; ch < features; ++ch) {
        gw_row[ch] += g * p_row[ch];
        grad_pooled[static_cast<std::size_t>(n * features + ch)] += g * w_row[ch];
      }
      grads.head.bias[static_cast<std::size_t>(k)] += g;
    }
  }

  // Broadcast the pooled gradient uniformly over the final feature map.
  const Tensor4& last = trace.stage_preact.back();
  Tensor4 dx(last.n(), last.c(), last.h(), last.w());
  const std::int64_t plane = last.h() * last.w();
  for (std::int64_t n = 0; n < nb; ++n) {
    for (std::int64_t ch = 0; ch < features; ++ch) {
      const double g =
          grad_pooled[static_cast<std::size_t>(n * features + ch)] /
          static_cast<double>(plane);
      double* p = dx.data() + dx.index(n, ch, 0, 0);
      for (std::int64_t i = 0; i < plane; ++i) p[i] = g;
    }
  }

  for (std::int64_t s = static_cast<std::int64_t>(stages.size()) - 1; s >= 0; --s) {
    const Stage& stage = stages[static_cast<std::size_t>(s)];
    const Tensor4& preact = trace.stage_preact[static_cast<std::size_t>(s)];
    if (stage.relu) {
      double* gp = dx.data();
      const double* pp = preact.data();
      const std::int64_t count = dx.size();
      for (std::int64_t i = 0; i < count; ++i) {
        if (pp[i] <= 0.0) gp[i] = 0.0;
      }
    }
    const Tensor4& stage_in = trace.stage_inputs[static_cast<std::size_t>(s)];
    ParamGrads& pg = grads.stages[static_cast<std::size_t>(s)];
    dx = std::visit(
        [&](const auto& op) {
          if constexpr (std::is_same_v<std::decay_t<decltype(op)>, ConvStage>) {
            ConvGradients cg = grouped_conv_backward(dx, stage_in, op.wts, op.spec);
            pg.weight = std::move(cg.grad_weight);
            pg.bias = std::move(cg.grad_bias);
            return std::move(cg.grad_input);
          } else {
            SccGradients sg = scc_backward(dx, stage_in, op.wts, op.cfg);
            pg.weight = std::move(sg.params.grad_weight);
            pg.bias = std::move(sg.params.grad_bias);
            return std::move(sg.grad_input);
          }
        },
        stage.op);
  }
  return grads;
}

void Network::apply_sgd(const NetworkGradients& grads, double learning_rate) {
  if (grads.stages.size() != stages.size()) {
    throw ShapeError("gradient bundle does not match network stage count");
  }
  auto update = [learning_rate](std::vector<double>& params,
                                const std::vector<double>& g) {
    if (params.size() != g.size()) {
      throw ShapeError("gradient array does not match parameter array");
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * g[i];
  };
  for (std::size_t s = 0; s < stages.size(); ++s) {
    std::visit(
        [&](auto& op) {
          update(op.wts.weight, grads.stages[s].weight);
          update(op.wts.bias, grads.stages[s].bias);
        },
        stages[s].op);
  }
  update(head.weight, grads.head.weight);
  update(head.bias, grads.head.bias);
}

}  // namespace sccl
