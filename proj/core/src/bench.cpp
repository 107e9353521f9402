#include "sccl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>

#include "sccl/errors.hpp"
#include "sccl/kernel.hpp"
#include "sccl/reference.hpp"
#include "sccl/rng.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string::size_type begin = 0;
  while (begin <= text.size()) {
    const std::string::size_type end = text.find(sep, begin);
    if (end == std::string::npos) {
      parts.push_back(text.substr(begin));
      break;
    }
    parts.push_back(text.substr(begin, end - begin));
    begin = end + 1;
  }
  return parts;
}

std::int64_t parse_positive_count(const std::string& token, const std::string& key) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(token, &used);
  } catch (const std::exception&) {
    throw ArgumentError("sweep key '" + key + "': bad value '" + token + "'");
  }
  if (used != token.size() || value < 1) {
    throw ArgumentError("sweep key '" + key + "': value '" + token +
                        "' must be a positive integer");
  }
  return value;
}

Overlap parse_sweep_overlap(const std::string& token) {
  // Sweep overlap values are fractions of the window width: "50%" and any
  // bare number > 1 are percentages; numbers <= 1 are direct fractions.
  std::string body = token;
  bool percent = false;
  if (!body.empty() && body.back() == '%') {
    body.pop_back();
    percent = true;
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(body, &used);
  } catch (const std::exception&) {
    throw ArgumentError("sweep key 'co': bad value '" + token + "'");
  }
  if (used != body.size() || value < 0.0) {
    throw ArgumentError("sweep key 'co': bad value '" + token + "'");
  }
  if (percent || value > 1.0) value /= 100.0;
  return Overlap::ratio(value);
}

double time_once(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

double mean_wall_ms(const std::function<void()>& fn, std::int64_t repeats) {
  fn();  // discarded warm-up
  double total = 0.0;
  for (std::int64_t r = 0; r < repeats; ++r) total += time_once(fn);
  return std::max(total / static_cast<double>(repeats), 1e-6);
}

}  // namespace

std::vector<BenchConfig> parse_sweep(const std::string& sweep) {
  std::vector<std::int64_t> cins{64}, couts{64}, cgs{2}, spatials{16}, batches{8};
  std::vector<Overlap> cos{Overlap::ratio(0.5)};

  for (const std::string& clause : split(sweep, ';')) {
    if (clause.empty()) continue;
    const std::string::size_type eq = clause.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError("sweep clause '" + clause + "' is not key=values");
    }
    const std::string key = clause.substr(0, eq);
    const std::vector<std::string> tokens = split(clause.substr(eq + 1), ',');
    if (tokens.empty() || (tokens.size() == 1 && tokens[0].empty())) {
      throw ArgumentError("sweep key '" + key + "' has no values");
    }
    if (key == "co") {
      cos.clear();
      for (const std::string& t : tokens) cos.push_back(parse_sweep_overlap(t));
      continue;
    }
    std::vector<std::int64_t>* target = nullptr;
    if (key == "cin") {
      target = &cins;
    } else if (key == "cout") {
      target = &couts;
    } else if (key == "cg") {
      target = &cgs;
    } else if (key == "spatial") {
      target = &spatials;
    } else if (key == "batch") {
      target = &batches;
    } else {
      throw ArgumentError("unknown sweep key '" + key + "'");
    }
    target->clear();
    for (const std::string& t : tokens) target->push_back(parse_positive_count(t, key));
  }

  std::vector<BenchConfig> configs;
  for (const std::int64_t cin : cins) {
    for (const std::int64_t cout : couts) {
      for (const std::int64_t cg : cgs) {
        for (const Overlap& co : cos) {
          for (const std::int64_t spatial : spatials) {
            for (const std::int64_t batch : batches) {
              configs.push_back(BenchConfig{cin, cout, cg, co, spatial, batch});
            }
          }
        }
      }
    }
  }
  return configs;
}

std::vector<BenchRow> run_bench(const std::vector<BenchConfig>& configs,
                                const BenchOptions& opts) {
  if (opts.repeats < 1) throw ArgumentError("repeats must be >= 1");
  std::vector<BenchRow> rows;
  Rng rng(opts.seed);

  for (const BenchConfig& bc : configs) {
    const SccConfig cfg =
        scc_config_new(bc.c_in, bc.c_out, bc.cg, bc.co, /*has_bias=*/true);
    const Tensor4 input = tensor_normal(bc.batch, bc.c_in, bc.spatial, bc.spatial, rng);
    SccWeights wts = scc_weights_init(cfg, rng);
    const Tensor4 grad_out =
        tensor_normal(bc.batch, bc.c_out, bc.spatial, bc.spatial, rng);

    // Correctness gate: every implementation must produce the same forward
    // map before any of them is worth timing.
    const Tensor4 direct = scc_forward(input, wts, cfg);
    CompositionStats stats_stack_cc, stats_conv_cc, stats_plain;
    {
      const CompositionResult cs = scc_channel_stack_forward(input, wts, cfg, false);
      const CompositionResult cs_cc = scc_channel_stack_forward(input, wts, cfg, true);
      const CompositionResult vs = scc_conv_stack_forward(input, wts, cfg, false);
      const CompositionResult vs_cc = scc_conv_stack_forward(input, wts, cfg, true);
      const double gate = std::max({max_abs_diff(direct, cs.output),
                                    max_abs_diff(direct, cs_cc.output),
                                    max_abs_diff(direct, vs.output),
                                    max_abs_diff(direct, vs_cc.output)});
      if (gate > 1e-12) {
        throw NumericError("forward implementations disagree by " +
                           std::to_string(gate) + "; refusing to time them");
      }
      stats_plain = cs.stats;  // == vs.stats: both store c_out·group_width
      stats_stack_cc = cs_cc.stats;
      stats_conv_cc = vs_cc.stats;
    }

    struct Impl {
      const char* name;
      std::int64_t aux;
      std::function<void()> forward;
      std::function<void()> backward;
    };
    const std::vector<Impl> impls = {
        {"direct", 0, [&] { scc_forward(input, wts, cfg); },
         [&] { scc_backward(grad_out, input, wts, cfg); }},
        {"channel_stack", stats_plain.aux_channels_stored,
         [&] { scc_channel_stack_forward(input, wts, cfg, false); },
         [&] { scc_channel_stack_backward(grad_out, input, wts, cfg, false); }},
        {"channel_stack_cc", stats_stack_cc.aux_channels_stored,
         [&] { scc_channel_stack_forward(input, wts, cfg, true); },
         [&] { scc_channel_stack_backward(grad_out, input, wts, cfg, true); }},
        {"conv_stack", stats_plain.aux_channels_stored,
         [&] { scc_conv_stack_forward(input, wts, cfg, false); },
         [&] { scc_conv_stack_backward(grad_out, input, wts, cfg, false); }},
        {"conv_stack_cc", stats_conv_cc.aux_channels_stored,
         [&] { scc_conv_stack_forward(input, wts, cfg, true); },
         [&] { scc_conv_stack_backward(grad_out, input, wts, cfg, true); }},
    };

    for (const Impl& impl : impls) {
      BenchRow fwd;
      fwd.implementation = impl.name;
      fwd.phase = "forward";
      fwd.config = bc;
      fwd.aux_channels = impl.aux;
      fwd.wall_ms = mean_wall_ms(impl.forward, opts.repeats);
      rows.push_back(fwd);

      BenchRow bwd = fwd;
      bwd.phase = "backward";
      bwd.wall_ms = mean_wall_ms(impl.backward, opts.repeats);
      rows.push_back(bwd);
    }
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "implementation,phase,c_in,c_out,cg,co,spatial,batch,wall_ms,aux_channels\n";
  for (const BenchRow& row : rows) {
    out << row.implementation << ',' << row.phase << ',' << row.config.c_in << ','
        << row.config.c_out << ',' << row.config.cg << ',' << row.config.co.str()
        << ',' << row.config.spatial << ',' << row.config.batch << ',' << row.wall_ms
        << ',' << row.aux_channels << '\n';
  }
}

}  // namespace sccl
