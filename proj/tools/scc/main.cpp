// Command-line front end: cycle inspection, cost tables, correctness checks,
// desk-scale training, and micro-benchmarks for the sliding-channel
// convolution library.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sccl/bench.hpp"
#include "sccl/config.hpp"
#include "sccl/cost.hpp"
#include "sccl/cycle.hpp"
#include "sccl/dataset.hpp"
#include "sccl/errors.hpp"
#include "sccl/fixture.hpp"
#include "sccl/gradcheck.hpp"
#include "sccl/kernel.hpp"
#include "sccl/model.hpp"
#include "sccl/parallel.hpp"
#include "sccl/train.hpp"

namespace {

struct SharedOpts {
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware default
};

void warn_if_degenerate(const sccl::SccConfig& cfg) {
  if (cfg.fully_overlapped()) {
    std::cerr << "warning: overlap equals the window width, so every filter reads "
                 "the same window (cyclic distance 1)\n";
  }
}

int run_cycle(std::int64_t c_in, std::int64_t c_out, std::int64_t cg,
              const std::string& co) {
  const sccl::SccConfig cfg =
      sccl::scc_config_new(c_in, c_out, cg, sccl::Overlap::parse(co), true);
  warn_if_degenerate(cfg);
  const sccl::ChannelCycle cycle = sccl::compute_channel_cycle(cfg);
  for (std::int64_t i = 0; i < cycle.cyclic_dist; ++i) {
    const sccl::ChannelWindow& win = cycle.windows[static_cast<std::size_t>(i)];
    std::printf("%" PRId64 " %" PRId64 "..%" PRId64 "\n", i, win.start,
                win.last(cfg.c_in));
  }
  std::printf("cyclic_dist %" PRId64 "\n", cycle.cyclic_dist);
  return 0;
}

int run_cost(const std::string& model_path, std::int64_t spatial, bool csv,
             bool count_bias) {
  const sccl::ModelSpec spec = sccl::parse_model_spec_file(model_path);
  const std::vector<sccl::LayerSpec> layers =
      sccl::model_cost_layers(spec, spatial, count_bias);

  if (csv) {
    std::printf("layer,kind,c_in,c_out,spatial,macs,params,flops\n");
  } else {
    std::printf("%-5s %-16s %6s %6s %8s %14s %12s %14s\n", "layer", "kind", "c_in",
                "c_out", "spatial", "macs", "params", "flops");
  }
  sccl::CostReport total;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const sccl::LayerSpec& ls = layers[i];
    const sccl::CostReport r = sccl::layer_cost(ls);
    total.macs += r.macs;
    total.params += r.params;
    if (csv) {
      std::printf("%zu,%s,%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRId64
                  ",%" PRId64 "\n",
                  i, sccl::layer_kind_name(ls.kind), ls.c_in, ls.c_out, ls.spatial,
                  r.macs, r.params, r.flops());
    } else {
      std::printf("%-5zu %-16s %6" PRId64 " %6" PRId64 " %8" PRId64 " %14" PRId64
                  " %12" PRId64 " %14" PRId64 "\n",
                  i, sccl::layer_kind_name(ls.kind), ls.c_in, ls.c_out, ls.spatial,
                  r.macs, r.params, r.flops());
    }
  }
  if (csv) {
    std::printf("total,,,,,%" PRId64 ",%" PRId64 ",%" PRId64 "\n", total.macs,
                total.params, total.flops());
  } else {
    std::printf("%-5s %-16s %6s %6s %8s %14" PRId64 " %12" PRId64 " %14" PRId64 "\n",
                "total", "", "", "", "", total.macs, total.params, total.flops());
  }
  return 0;
}

// Golden-fixture probes: canonical configs whose forward output is written
// on the first run and must reproduce bit-exactly on later runs.
int run_fixture_probes(const std::string& dir, std::uint64_t seed) {
  struct Probe {
    std::int64_t c_in, c_out, cg;
    const char* co;
  };
  const Probe probes[] = {
      {4, 4, 2, "1"}, {6, 6, 2, "33%"}, {8, 16, 4, "50%"}, {12, 12, 3, "2"}};
  int failures = 0;
  int index = 0;
  for (const Probe& p : probes) {
    const sccl::SccConfig cfg =
        sccl::scc_config_new(p.c_in, p.c_out, p.cg, sccl::Overlap::parse(p.co), true);
    sccl::Rng rng(seed + static_cast<std::uint64_t>(index));
    const sccl::Tensor4 input = sccl::tensor_normal(2, cfg.c_in, 5, 5, rng);
    sccl::SccWeights wts = sccl::scc_weights_init(cfg, rng);
    const sccl::Tensor4 out = sccl::scc_forward(input, wts, cfg);
    const std::string path = dir + "/probe_" + std::to_string(index) + ".dsx";
    std::ifstream exists(path);
    if (!exists.good()) {
      sccl::fixture_write(out, path);
      std::printf("fixture %s written\n", path.c_str());
    } else {
      const sccl::Tensor4 golden = sccl::fixture_read(path);
      const double diff = sccl::max_abs_diff(out, golden);
      if (diff != 0.0) {
        std::printf("fixture %s MISMATCH (max abs diff %.3g)\n", path.c_str(), diff);
        ++failures;
      } else {
        std::printf("fixture %s ok\n", path.c_str());
      }
    }
    ++index;
  }
  return failures == 0 ? 0 : 1;
}

int run_check(const SharedOpts& shared, std::int64_t trials, std::int64_t c_in,
              std::int64_t c_out, std::int64_t cg, const std::string& co,
              std::int64_t spatial, std::int64_t batch, const std::string& fixtures) {
  sccl::GradCheckSettings settings;
  settings.trials = trials;
  settings.seed = shared.seed;
  if (c_in > 0) {
    const sccl::SccConfig cfg =
        sccl::scc_config_new(c_in, c_out > 0 ? c_out : c_in, cg,
                             sccl::Overlap::parse(co), true);
    warn_if_degenerate(cfg);
    settings.fixed_config = cfg;
    if (spatial > 0) settings.fixed_spatial = spatial;
    if (batch > 0) settings.fixed_batch = batch;
  }

  const sccl::GradCheckReport report = sccl::grad_check_driver(settings);
  std::printf("config,max-abs-diff,max-rel-grad-err\n");
  for (const sccl::GradCheckTrial& trial : report.trials) {
    std::printf("%s,%.3e,%.3e%s\n", trial.config.c_str(), trial.max_abs_diff,
                trial.max_rel_grad_err, trial.passed ? "" : ",FAIL");
  }
  int status = report.all_passed ? 0 : 1;
  if (!fixtures.empty()) {
    status = run_fixture_probes(fixtures, shared.seed) == 0 ? status : 1;
  }
  std::printf("%s\n", status == 0 ? "all checks passed" : "CHECK FAILURES");
  return status;
}

int run_train(const SharedOpts& shared, const std::string& model_path,
              std::int64_t epochs, double lr, std::int64_t batch,
              const std::string& dataset, std::int64_t samples, std::int64_t classes,
              std::int64_t spatial) {
  const sccl::ModelSpec spec = sccl::parse_model_spec_file(model_path);
  sccl::Network net = sccl::build_network(spec, shared.seed);

  sccl::LabeledDataset data;
  if (dataset == "synthetic") {
    data = sccl::synth_dataset(shared.seed, samples, classes, net.input_channels(),
                               spatial);
  } else {
    data = sccl::load_fixture_dataset(dataset);
  }

  sccl::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.learning_rate = lr;
  cfg.seed = shared.seed;
  const std::vector<sccl::EpochStats> history = sccl::train(net, data, cfg);
  for (const sccl::EpochStats& e : history) {
    std::printf("epoch %" PRId64 " loss %.6f accuracy %.4f\n", e.epoch, e.loss,
                e.accuracy);
  }
  return 0;
}

int run_bench(const SharedOpts& shared, const std::string& sweep, std::int64_t repeats,
              const std::string& out_path) {
  const std::vector<sccl::BenchConfig> configs = sccl::parse_sweep(sweep);
  for (const sccl::BenchConfig& bc : configs) {
    warn_if_degenerate(sccl::scc_config_new(bc.c_in, bc.c_out, bc.cg, bc.co, true));
  }
  sccl::BenchOptions opts;
  opts.repeats = repeats;
  opts.seed = shared.seed;
  const std::vector<sccl::BenchRow> rows = sccl::run_bench(configs, opts);
  if (out_path.empty()) {
    sccl::write_bench_csv(rows, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw sccl::ArgumentError("cannot open '" + out_path + "' for writing");
    sccl::write_bench_csv(rows, out);
    std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sliding-channel convolution toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  SharedOpts shared;
  app.add_option("--seed", shared.seed, "deterministic seed")->capture_default_str();
  app.add_option("--threads", shared.threads, "worker threads (0 = hardware)")
      ->capture_default_str();

  // cycle
  auto* cycle_cmd = app.add_subcommand("cycle", "print the input-channel windows");
  std::int64_t cy_cin = 4, cy_cout = 4, cy_cg = 2;
  std::string cy_co = "50%";
  cycle_cmd->add_option("--c-in", cy_cin, "input channels")->capture_default_str();
  cycle_cmd->add_option("--c-out", cy_cout, "output channels")->capture_default_str();
  cycle_cmd->add_option("--cg", cy_cg, "channel groups")->capture_default_str();
  cycle_cmd->add_option("--co", cy_co, "window overlap: \"50%\", 0.5, or channels")
      ->capture_default_str();

  // cost
  auto* cost_cmd = app.add_subcommand("cost", "MAC/parameter counts for a model spec");
  std::string cost_model;
  std::int64_t cost_spatial = 32;
  bool cost_csv = false, cost_bias = false;
  cost_cmd->add_option("--model", cost_model, "model spec JSON")->required();
  cost_cmd->add_option("--spatial", cost_spatial, "input spatial extent")
      ->capture_default_str();
  cost_cmd->add_flag("--csv", cost_csv, "emit CSV instead of a table");
  cost_cmd->add_flag("--bias", cost_bias, "count bias parameters");

  // check
  auto* check_cmd =
      app.add_subcommand("check", "gradient and oracle-equivalence suites");
  std::int64_t ck_trials = 20, ck_cin = 0, ck_cout = 0, ck_cg = 1, ck_spatial = 0,
               ck_batch = 0;
  std::string ck_co = "50%", ck_fixtures;
  check_cmd->add_option("--trials", ck_trials, "trials per operator family")
      ->capture_default_str();
  check_cmd->add_option("--c-in", ck_cin, "pin input channels (0 = randomize)")
      ->capture_default_str();
  check_cmd->add_option("--c-out", ck_cout, "pin output channels");
  check_cmd->add_option("--cg", ck_cg, "pinned channel groups");
  check_cmd->add_option("--co", ck_co, "pinned overlap");
  check_cmd->add_option("--spatial", ck_spatial, "pin spatial extent");
  check_cmd->add_option("--batch", ck_batch, "pin batch size");
  check_cmd->add_option("--fixtures", ck_fixtures,
                        "directory of golden forward-output fixtures");

  // train
  auto* train_cmd = app.add_subcommand("train", "desk-scale SGD training");
  std::string tr_model, tr_dataset = "synthetic";
  std::int64_t tr_epochs = 30, tr_batch = 32, tr_samples = 512, tr_classes = 4,
               tr_spatial = 8;
  double tr_lr = 0.05;
  train_cmd->add_option("--model", tr_model, "model spec JSON")->required();
  train_cmd->add_option("--epochs", tr_epochs, "training epochs")->capture_default_str();
  train_cmd->add_option("--lr", tr_lr, "learning rate")->capture_default_str();
  train_cmd->add_option("--batch", tr_batch, "batch size")->capture_default_str();
  train_cmd->add_option("--dataset", tr_dataset, "\"synthetic\" or a fixture directory")
      ->capture_default_str();
  train_cmd->add_option("--samples", tr_samples, "synthetic sample count")
      ->capture_default_str();
  train_cmd->add_option("--classes", tr_classes, "synthetic class count")
      ->capture_default_str();
  train_cmd->add_option("--spatial", tr_spatial, "synthetic spatial extent")
      ->capture_default_str();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "micro-benchmark CSV");
  std::string bn_sweep = "cg=2;co=50;cin=64;cout=64;spatial=16;batch=8", bn_out;
  std::int64_t bn_repeats = 3;
  bench_cmd->add_option("--sweep", bn_sweep, "semicolon-separated key=values sweep")
      ->capture_default_str();
  bench_cmd->add_option("--repeats", bn_repeats, "timed repetitions")
      ->capture_default_str();
  bench_cmd->add_option("--out", bn_out, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    sccl::set_num_threads(shared.threads);
    if (cycle_cmd->parsed()) return run_cycle(cy_cin, cy_cout, cy_cg, cy_co);
    if (cost_cmd->parsed()) return run_cost(cost_model, cost_spatial, cost_csv, cost_bias);
    if (check_cmd->parsed()) {
      return run_check(shared, ck_trials, ck_cin, ck_cout, ck_cg, ck_co, ck_spatial,
                       ck_batch, ck_fixtures);
    }
    if (train_cmd->parsed()) {
      return run_train(shared, tr_model, tr_epochs, tr_lr, tr_batch, tr_dataset,
                       tr_samples, tr_classes, tr_spatial);
    }
    if (bench_cmd->parsed()) return run_bench(shared, bn_sweep, bn_repeats, bn_out);
  } catch (const sccl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
