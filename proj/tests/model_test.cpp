#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "sccl/errors.hpp"
#include "sccl/model.hpp"
#include "sccl/rng.hpp"
#include "sccl/tensor.hpp"

using sccl::ModelSpec;
using sccl::Tensor4;

namespace {

ModelSpec parse(const std::string& text) {
  std::istringstream in(text);
  return sccl::parse_model_spec(in);
}

const char* kTwoBlock = R"({
  "layers": [
    {"kind": "dsc_block", "c_in": 4, "c_out": 8, "kernel": 3, "cg": 2, "co": "50%"},
    {"kind": "dsc_block", "c_in": 8, "c_out": 8, "kernel": 3, "cg": 2, "co": "50%"}
  ],
  "head": {"pool": "global-average", "classes": 4}
})";

}  // namespace

TEST_CASE("model spec parsing with defaults") {
  const ModelSpec spec = parse(R"({
    "layers": [
      {"kind": "standard", "c_in": 3, "c_out": 8, "kernel": 3, "stride": 2},
      {"kind": "scc", "c_in": 8, "c_out": 16, "cg": 2, "co": "50%", "activation": "none"}
    ],
    "head": {"pool": "global-average", "classes": 10}
  })");
  REQUIRE(spec.layers.size() == 2);
  CHECK(spec.layers[0].kind == sccl::LayerKind::kStandard);
  CHECK(spec.layers[0].stride == 2);
  CHECK(spec.layers[0].relu);
  CHECK(spec.layers[1].kind == sccl::LayerKind::kScc);
  CHECK(spec.layers[1].kernel == 1);
  CHECK(spec.layers[1].stride == 1);
  CHECK_FALSE(spec.layers[1].relu);
  CHECK(spec.head.classes == 10);
}

TEST_CASE("malformed json reports the position") {
  try {
    parse("{\"layers\": [\n  {\"kind\": \"standard\",,}\n]}");
    FAIL("expected SpecError");
  } catch (const sccl::SpecError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("model spec:") != std::string::npos);
    CHECK(msg.find("line") != std::string::npos);
  }
}

TEST_CASE("spec validation errors") {
  CHECK_THROWS_AS(parse(R"({"layers": [], "head": {"pool": "global-average", "classes": 2}})"),
                  sccl::SpecError);
  CHECK_THROWS_AS(parse(R"({"layers": [
      {"kind": "warp", "c_in": 4, "c_out": 4}],
      "head": {"pool": "global-average", "classes": 2}})"),
                  sccl::SpecError);
  CHECK_THROWS_AS(parse(R"({"layers": [
      {"kind": "pointwise", "c_in": 4, "c_out": 8},
      {"kind": "pointwise", "c_in": 6, "c_out": 8}],
      "head": {"pool": "global-average", "classes": 2}})"),
                  sccl::SpecError);
  CHECK_THROWS_AS(parse(R"({"layers": [
      {"kind": "depthwise", "c_in": 4, "c_out": 8, "kernel": 3}],
      "head": {"pool": "global-average", "classes": 2}})"),
                  sccl::SpecError);
  CHECK_THROWS_AS(parse(R"({"layers": [
      {"kind": "pointwise", "c_in": 4, "c_out": 8}]})"),
                  sccl::SpecError);
  CHECK_THROWS_AS(parse(R"({"layers": [
      {"kind": "pointwise", "c_in": 4, "c_out": 8}],
      "head": {"pool": "max", "classes": 2}})"),
                  sccl::SpecError);
  CHECK_THROWS_AS(parse(R"({"layers": [
      {"kind": "pointwise", "c_in": 4, "c_out": 8}],
      "head": {"pool": "global-average", "classes": 1}})"),
                  sccl::SpecError);
  CHECK_THROWS_AS(parse(R"({"layers": [
      {"kind": "pointwise", "c_in": 4, "c_out": 8, "activation": "tanh"}],
      "head": {"pool": "global-average", "classes": 2}})"),
                  sccl::SpecError);
}

TEST_CASE("cost layers propagate the spatial extent") {
  const ModelSpec spec = parse(R"({
    "layers": [
      {"kind": "standard", "c_in": 3, "c_out": 8, "kernel": 3, "stride": 2},
      {"kind": "dsc_block", "c_in": 8, "c_out": 16, "kernel": 3, "stride": 2, "cg": 2},
      {"kind": "pointwise", "c_in": 16, "c_out": 16}
    ],
    "head": {"pool": "global-average", "classes": 4}
  })");
  const auto layers = sccl::model_cost_layers(spec, 16, false);
  REQUIRE(layers.size() == 3);
  CHECK(layers[0].spatial == 16);
  CHECK(layers[1].spatial == 8);
  CHECK(layers[2].spatial == 4);
}

TEST_CASE("network forward shapes and trace") {
  const ModelSpec spec = parse(kTwoBlock);
  const sccl::Network net = sccl::build_network(spec, 7);
  REQUIRE(net.stages.size() == 4);  // each block is a spatial stage + a mix stage
  CHECK(net.input_channels() == 4);
  CHECK(net.classes() == 4);

  sccl::Rng rng(3);
  const Tensor4 input = sccl::tensor_normal(2, 4, 8, 8, rng);
  sccl::NetworkTrace trace;
  const std::vector<double> logits = net.forward(input, &trace);
  CHECK(logits.size() == 2 * 4);
  CHECK(trace.stage_inputs.size() == 4);
  CHECK(trace.stage_preact.size() == 4);
  CHECK(trace.pooled.size() == 2 * 8);

  const Tensor4 bad = sccl::tensor_normal(2, 5, 8, 8, rng);
  CHECK_THROWS_AS(net.forward(bad), sccl::ShapeError);
}

TEST_CASE("network building is deterministic in the seed") {
  const ModelSpec spec = parse(kTwoBlock);
  const sccl::Network a = sccl::build_network(spec, 42);
  const sccl::Network b = sccl::build_network(spec, 42);
  sccl::Rng rng(5);
  const Tensor4 input = sccl::tensor_normal(1, 4, 6, 6, rng);
  const auto la = a.forward(input);
  const auto lb = b.forward(input);
  REQUIRE(la.size() == lb.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    CHECK(std::memcmp(&la[i], &lb[i], sizeof(double)) == 0);
  }
}

TEST_CASE("dense sliding stage with full overlap matches a pointwise stage") {
  // cg=1 with 100% overlap keeps every window anchored at channel zero, so the
  // sliding stage and the dense 1x1 stage draw and use identical parameters.
  const ModelSpec with_scc = parse(R"({
    "layers": [
      {"kind": "scc", "c_in": 6, "c_out": 6, "cg": 1, "co": "100%"}
    ],
    "head": {"pool": "global-average", "classes": 3}
  })");
  const ModelSpec with_pw = parse(R"({
    "layers": [
      {"kind": "pointwise", "c_in": 6, "c_out": 6}
    ],
    "head": {"pool": "global-average", "classes": 3}
  })");
  const sccl::Network a = sccl::build_network(with_scc, 11);
  const sccl::Network b = sccl::build_network(with_pw, 11);
  sccl::Rng rng(6);
  const Tensor4 input = sccl::tensor_normal(2, 6, 4, 4, rng);
  const auto la = a.forward(input);
  const auto lb = b.forward(input);
  REQUIRE(la.size() == lb.size());
  for (std::size_t i = 0; i < la.size(); ++i) CHECK(la[i] == lb[i]);
}

TEST_CASE("network backward matches finite differences at the head") {
  const ModelSpec spec = parse(kTwoBlock);
  sccl::Network net = sccl::build_network(spec, 9);
  sccl::Rng rng(4);
  const Tensor4 input = sccl::tensor_normal(2, 4, 5, 5, rng);

  sccl::NetworkTrace trace;
  const std::vector<double> logits = net.forward(input, &trace);
  // Loss = sum of logits * probe.
  std::vector<double> probe(logits.size());
  for (double& p : probe) p = rng.normal();
  const sccl::NetworkGradients grads = net.backward(trace, probe);

  auto loss = [&]() {
    const auto l = net.forward(input);
    double acc = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) acc += l[i] * probe[i];
    return acc;
  };
  const double eps = 1e-6;

  // Head weight entry.
  {
    const double saved = net.head.weight[3];
    net.head.weight[3] = saved + eps;
    const double up = loss();
    net.head.weight[3] = saved - eps;
    const double down = loss();
    net.head.weight[3] = saved;
    const double fd = (up - down) / (2.0 * eps);
    CHECK(grads.head.weight[3] == doctest::Approx(fd).epsilon(1e-4));
  }

  // A weight inside the first stage.
  {
    std::visit(
        [&](auto& op) {
          double* w = op.wts.weight.data();
          const double saved = w[0];
          w[0] = saved + eps;
          const double up = loss();
          w[0] = saved - eps;
          const double down = loss();
          w[0] = saved;
          const double fd = (up - down) / (2.0 * eps);
          CHECK(grads.stages[0].weight[0] == doctest::Approx(fd).epsilon(1e-4));
        },
        net.stages[0].op);
  }
}

TEST_CASE("sgd moves parameters against the gradient") {
  const ModelSpec spec = parse(kTwoBlock);
  sccl::Network net = sccl::build_network(spec, 13);
  sccl::Rng rng(8);
  const Tensor4 input = sccl::tensor_normal(2, 4, 5, 5, rng);
  sccl::NetworkTrace trace;
  (void)net.forward(input, &trace);
  std::vector<double> probe(static_cast<std::size_t>(2 * net.classes()), 1.0);
  const sccl::NetworkGradients grads = net.backward(trace, probe);
  const double before = net.head.bias[0];
  net.apply_sgd(grads, 0.5);
  CHECK(net.head.bias[0] == before - 0.5 * grads.head.bias[0]);
}
