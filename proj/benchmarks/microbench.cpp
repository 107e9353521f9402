// Microbenchmarks comparing the direct sliding-window kernel against the
// stacking compositions, forward and backward, across overlap settings.
#include <cstdint>

#include <benchmark/benchmark.h>

#include "sccl/config.hpp"
#include "sccl/kernel.hpp"
#include "sccl/reference.hpp"
#include "sccl/rng.hpp"
#include "sccl/tensor.hpp"

namespace {

struct Instance {
  sccl::SccConfig cfg;
  sccl::SccWeights wts;
  sccl::Tensor4 input;
  sccl::Tensor4 grad_out;
};

Instance make_instance(std::int64_t c, std::int64_t cg, double overlap,
                       std::int64_t spatial, std::int64_t batch) {
  sccl::Rng rng(42);
  Instance inst{
      sccl::scc_config_new(c, c, cg, sccl::Overlap::ratio(overlap), true),
      {},
      {},
      {},
  };
  inst.wts = sccl::scc_weights_init(inst.cfg, rng);
  inst.input = sccl::tensor_normal(batch, c, spatial, spatial, rng);
  inst.grad_out = sccl::tensor_normal(batch, c, spatial, spatial, rng);
  return inst;
}

void BM_DirectForward(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2, 0.5, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sccl::scc_forward(inst.input, inst.wts, inst.cfg));
  }
}
BENCHMARK(BM_DirectForward)->Arg(32)->Arg(64)->Arg(128);

void BM_ChannelStackForward(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2, 0.5, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sccl::scc_channel_stack_forward(inst.input, inst.wts, inst.cfg, false));
  }
}
BENCHMARK(BM_ChannelStackForward)->Arg(32)->Arg(64)->Arg(128);

void BM_ChannelStackCycleForward(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2, 0.5, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sccl::scc_channel_stack_forward(inst.input, inst.wts, inst.cfg, true));
  }
}
BENCHMARK(BM_ChannelStackCycleForward)->Arg(32)->Arg(64)->Arg(128);

void BM_ConvStackCycleForward(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2, 0.5, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sccl::scc_conv_stack_forward(inst.input, inst.wts, inst.cfg, true));
  }
}
BENCHMARK(BM_ConvStackCycleForward)->Arg(32)->Arg(64)->Arg(128);

void BM_DirectBackward(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2, 0.5, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sccl::scc_backward(inst.grad_out, inst.input, inst.wts, inst.cfg));
  }
}
BENCHMARK(BM_DirectBackward)->Arg(32)->Arg(64)->Arg(128);

void BM_OverlapSweepForward(benchmark::State& state) {
  const double overlap = static_cast<double>(state.range(0)) / 100.0;
  const Instance inst = make_instance(64, 2, overlap, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sccl::scc_forward(inst.input, inst.wts, inst.cfg));
  }
}
BENCHMARK(BM_OverlapSweepForward)->Arg(0)->Arg(25)->Arg(50)->Arg(75);

}  // namespace

BENCHMARK_MAIN();
