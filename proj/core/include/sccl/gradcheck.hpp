#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sccl/config.hpp"

namespace sccl {

/// Gradient-checker settings. trials counts random instances per operator
/// family (sliding-window and grouped-convolution), so a run covers
/// 2·trials instances. eps is the central-difference step; tol the largest
/// acceptable norm-relative gradient error. weight_grad_hook, when set, may
/// mutate the analytic weight gradient before comparison — a test shim for
/// verifying that the checker actually catches wrong gradients.
struct GradCheckSettings {
  std::int64_t trials = 20;
  double eps = 1e-5;
  double tol = 1e-4;
  std::uint64_t seed = 2024;
  std::int64_t max_channels = 12;
  std::int64_t max_spatial = 5;
  std::int64_t max_batch = 3;
  std::function<void(std::vector<double>&)> weight_grad_hook;

  // Pin the sliding-window geometry instead of randomizing it (data still
  // varies per trial); the grouped-convolution suite is skipped when set.
  std::optional<SccConfig> fixed_config;
  std::optional<std::int64_t> fixed_spatial;
  std::optional<std::int64_t> fixed_batch;
};

/// One random instance's results. max_abs_diff is the forward agreement gap
/// across the composition implementations (sliding-window trials; 0 for
/// plain convolutions, which have no composition oracle). adjoint_gap is the
/// worse relative error of the two transpose identities — the map is linear
/// in the input for fixed weights and linear in the weights for fixed input,
/// so both ⟨G, F(X)⟩ = ⟨∂X, X⟩ + ⟨∂b, b⟩ and ⟨G, F(X)⟩ = ⟨∂W, W⟩ + ⟨∂b, b⟩
/// must hold exactly.
/// max_rel_grad_err is the worst norm-relative gap between analytic and
/// central-difference gradients over input, weight, and bias.
struct GradCheckTrial {
  std::string config;
  double max_abs_diff = 0.0;
  double adjoint_gap = 0.0;
  double max_rel_grad_err = 0.0;
  bool passed = false;
};

struct GradCheckReport {
  std::vector<GradCheckTrial> trials;
  bool all_passed = false;
};

/// Pass thresholds (besides settings.tol for the finite-difference column):
/// forward implementations must agree within kForwardAgreementTol and the
/// adjoint identity must hold within kAdjointTol, both fixed here rather
/// than configurable because they assert exactness, not approximation.
inline constexpr double kForwardAgreementTol = 1e-12;
inline constexpr double kAdjointTol = 1e-10;

/// Runs the random-instance suites and reports per-trial results.
/// Deterministic in settings.seed. Throws ArgumentError when trials < 1,
/// eps <= 0, or tol < 0 (tol = 0 is allowed; it fails every trial, which is
/// itself a useful strictness probe).
GradCheckReport grad_check_driver(const GradCheckSettings& settings);

/// Worst norm-relative gap between analytic[i] and the central difference of
/// loss() under params[i] ± eps: max_i |analytic_i - fd_i| normalized by
/// max(‖analytic‖∞, ‖fd‖∞, 1e-12). Restores params before returning.
double fd_max_rel_error(double* params, std::int64_t count, const double* analytic,
                        double eps, const std::function<double()>& loss);

}  // namespace sccl
