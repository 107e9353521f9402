#include "sccl/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sccl/errors.hpp"
#include "sccl/kernel.hpp"
#include "sccl/reference.hpp"
#include "sccl/rng.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

namespace {

double dot(const double* a, const double* b, std::int64_t count) {
  double sum = 0.0;
  for (std::int64_t i = 0; i < count; ++i) sum += a[i] * b[i];
  return sum;
}

double dot(const Tensor4& a, const Tensor4& b) {
  return dot(a.data(), b.data(), a.size());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a.data(), b.data(), static_cast<std::int64_t>(a.size()));
}

double max_abs(const double* p, std::int64_t count) {
  double m = 0.0;
  for (std::int64_t i = 0; i < count; ++i) m = std::max(m, std::fabs(p[i]));
  return m;
}

std::vector<std::int64_t> divisors_of(std::int64_t n) {
  std::vector<std::int64_t> d;
  for (std::int64_t i = 1; i <= n; ++i) {
    if (n % i == 0) d.push_back(i);
  }
  return d;
}

// The operator is linear in the input (weights fixed) and linear in the
// weights (input fixed), so two transpose identities must hold exactly:
//   ⟨G, F(X)⟩ = ⟨∂X, X⟩ + ⟨∂b, b⟩   and   ⟨G, F(X)⟩ = ⟨∂W, W⟩ + ⟨∂b, b⟩.
// Returns the worse relative violation.
double adjoint_gap(double lhs, double input_dot, double weight_dot,
                   double bias_dot) {
  const double worst = std::max(std::fabs(lhs - input_dot - bias_dot),
                                std::fabs(lhs - weight_dot - bias_dot));
  return worst / std::max(1.0, std::fabs(lhs));
}

GradCheckTrial run_scc_trial(Rng& rng, const GradCheckSettings& s) {
  SccConfig cfg;
  std::int64_t spatial, batch;
  if (s.fixed_config) {
    cfg = *s.fixed_config;
    spatial = s.fixed_spatial.value_or(1 + rng.index(s.max_spatial));
    batch = s.fixed_batch.value_or(1 + rng.index(s.max_batch));
  } else {
    // Random legal geometry: cg from the divisors of c_in, any legal overlap.
    const std::int64_t c_in = 2 + rng.index(s.max_channels - 1);
    const std::vector<std::int64_t> divs = divisors_of(c_in);
    const std::int64_t cg = divs[static_cast<std::size_t>(rng.index(
        static_cast<std::int64_t>(divs.size())))];
    const std::int64_t gw = c_in / cg;
    const std::int64_t overlap = rng.index(gw + 1);
    const std::int64_t c_out = 1 + rng.index(s.max_channels);
    spatial = 1 + rng.index(s.max_spatial);
    batch = 1 + rng.index(s.max_batch);
    const bool want_bias = rng.index(2) == 0;
    cfg = scc_config_new(c_in, c_out, cg, Overlap::channels(overlap), want_bias);
  }
  const std::int64_t c_in = cfg.c_in;
  const std::int64_t c_out = cfg.c_out;
  const std::int64_t cg = cfg.cg;
  const std::int64_t overlap = cfg.overlap_channels;
  const bool bias = cfg.has_bias;

  Tensor4 input = tensor_normal(batch, c_in, spatial, spatial, rng);
  SccWeights wts = scc_weights_init(cfg, rng);
  if (bias) {
    for (double& b : wts.bias) b = rng.uniform(-0.5, 0.5);
  }
  const Tensor4 cotangent = tensor_normal(batch, c_out, spatial, spatial, rng);

  GradCheckTrial trial;
  std::ostringstream desc;
  desc << "scc c_in=" << c_in << " c_out=" << c_out << " cg=" << cg
       << " overlap=" << overlap << " spatial=" << spatial << " batch=" << batch
       << " bias=" << (bias ? 1 : 0);
  trial.config = desc.str();

  // Forward agreement across the direct kernel and both compositions,
  // with and without the cyclic optimization.
  const Tensor4 direct = scc_forward(input, wts, cfg);
  for (const bool use_cc : {false, true}) {
    trial.max_abs_diff = std::max(
        trial.max_abs_diff,
        max_abs_diff(direct, scc_channel_stack_forward(input, wts, cfg, use_cc).output));
    trial.max_abs_diff = std::max(
        trial.max_abs_diff,
        max_abs_diff(direct, scc_conv_stack_forward(input, wts, cfg, use_cc).output));
  }

  // Analytic gradients (hook may corrupt the weight gradient on purpose).
  Tensor4 grad_input = scc_backward_input(cotangent, wts, cfg);
  SccParamGradients params = scc_backward_params(cotangent, input, cfg);
  if (s.weight_grad_hook) s.weight_grad_hook(params.grad_weight);

  trial.adjoint_gap = adjoint_gap(
      dot(cotangent, direct), dot(grad_input, input),
      dot(params.grad_weight, wts.weight),
      bias ? dot(params.grad_bias, wts.bias) : 0.0);

  const auto loss = [&]() { return dot(cotangent, scc_forward(input, wts, cfg)); };
  trial.max_rel_grad_err =
      fd_max_rel_error(input.data(), input.size(), grad_input.data(), s.eps, loss);
  trial.max_rel_grad_err = std::max(
      trial.max_rel_grad_err,
      fd_max_rel_error(wts.weight.data(), static_cast<std::int64_t>(wts.weight.size()),
                       params.grad_weight.data(), s.eps, loss));
  if (bias) {
    trial.max_rel_grad_err = std::max(
        trial.max_rel_grad_err,
        fd_max_rel_error(wts.bias.data(), static_cast<std::int64_t>(wts.bias.size()),
                         params.grad_bias.data(), s.eps, loss));
  }

  trial.passed = trial.max_abs_diff <= kForwardAgreementTol &&
                 trial.adjoint_gap <= kAdjointTol && trial.max_rel_grad_err <= s.tol;
  return trial;
}

GradCheckTrial run_conv_trial(Rng& rng, const GradCheckSettings& s) {
  ConvSpec spec;
  spec.c_in = 1 + rng.index(s.max_channels);
  const std::vector<std::int64_t> divs = divisors_of(spec.c_in);
  spec.groups = divs[static_cast<std::size_t>(rng.index(
      static_cast<std::int64_t>(divs.size())))];
  const std::int64_t max_cog = std::max<std::int64_t>(1, s.max_channels / spec.groups);
  spec.c_out = spec.groups * (1 + rng.index(max_cog));
  spec.kernel = rng.index(2) == 0 ? 1 : 3;
  spec.stride = 1 + rng.index(2);
  spec.padding = rng.index(2) == 0 ? 0 : spec.kernel / 2;
  const std::int64_t min_spatial = std::max<std::int64_t>(
      1, spec.kernel - 2 * spec.padding);
  const std::int64_t spatial =
      min_spatial + rng.index(std::max<std::int64_t>(1, s.max_spatial - min_spatial + 1));
  const std::int64_t batch = 1 + rng.index(s.max_batch);
  const bool bias = rng.index(2) == 0;

  Tensor4 input = tensor_normal(batch, spec.c_in, spatial, spatial, rng);
  ConvWeights wts = conv_weights_init(spec, bias, rng);
  if (bias) {
    for (double& b : wts.bias) b = rng.uniform(-0.5, 0.5);
  }
  const Tensor4 out = grouped_conv_forward(input, wts, spec);
  const Tensor4 cotangent = tensor_normal(out.n(), out.c(), out.h(), out.w(), rng);

  GradCheckTrial trial;
  std::ostringstream desc;
  desc << "conv c_in=" << spec.c_in << " c_out=" << spec.c_out << " W=" << spec.kernel
       << " stride=" << spec.stride << " pad=" << spec.padding
       << " groups=" << spec.groups << " spatial=" << spatial << " batch=" << batch
       << " bias=" << (bias ? 1 : 0);
  trial.config = desc.str();

  ConvGradients grads = grouped_conv_backward(cotangent, input, wts, spec);

  trial.adjoint_gap = adjoint_gap(
      dot(cotangent, out), dot(grads.grad_input, input),
      dot(grads.grad_weight, wts.weight),
      bias ? dot(grads.grad_bias, wts.bias) : 0.0);

  const auto loss = [&]() { return dot(cotangent, grouped_conv_forward(input, wts, spec)); };
  trial.max_rel_grad_err = fd_max_rel_error(input.data(), input.size(),
                                            grads.grad_input.data(), s.eps, loss);
  trial.max_rel_grad_err = std::max(
      trial.max_rel_grad_err,
      fd_max_rel_error(wts.weight.data(), static_cast<std::int64_t>(wts.weight.size()),
                       grads.grad_weight.data(), s.eps, loss));
  if (bias) {
    trial.max_rel_grad_err = std::max(
        trial.max_rel_grad_err,
        fd_max_rel_error(wts.bias.data(), static_cast<std::int64_t>(wts.bias.size()),
                         grads.grad_bias.data(), s.eps, loss));
  }

  trial.passed = trial.adjoint_gap <= kAdjointTol && trial.max_rel_grad_err <= s.tol;
  return trial;
}

}  // namespace

double fd_max_rel_error(double* params, std::int64_t count, const double* analytic,
                        double eps, const std::function<double()>& loss) {
  double worst_gap = 0.0;
  double fd_scale = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    const double up = loss();
    params[i] = saved - eps;
    const double down = loss();
    params[i] = saved;
    const double fd = (up - down) / (2.0 * eps);
    worst_gap = std::max(worst_gap, std::fabs(analytic[i] - fd));
    fd_scale = std::max(fd_scale, std::fabs(fd));
  }
  const double scale = std::max({max_abs(analytic, count), fd_scale, 1e-12});
  return worst_gap / scale;
}

GradCheckReport grad_check_driver(const GradCheckSettings& settings) {
  if (settings.trials < 1) throw ArgumentError("trials must be >= 1");
  if (settings.eps <= 0.0) throw ArgumentError("eps must be > 0");
  if (settings.tol < 0.0) throw ArgumentError("tol must be >= 0");

  Rng rng(settings.seed);
  GradCheckReport report;
  report.all_passed = true;
  for (std::int64_t t = 0; t < settings.trials; ++t) {
    report.trials.push_back(run_scc_trial(rng, settings));
    if (!settings.fixed_config) {
      report.trials.push_back(run_conv_trial(rng, settings));
    }
  }
  for (const GradCheckTrial& trial : report.trials) {
    report.all_passed = report.all_passed && trial.passed;
  }
  return report;
}

}  // namespace sccl
