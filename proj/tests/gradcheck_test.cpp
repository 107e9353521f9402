#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "sccl/errors.hpp"
#include "sccl/gradcheck.hpp"

using sccl::GradCheckReport;
using sccl::GradCheckSettings;

TEST_CASE("random instances pass the gradient check") {
  GradCheckSettings settings;
  settings.trials = 6;
  settings.seed = 31;
  const GradCheckReport report = sccl::grad_check_driver(settings);
  CHECK(report.all_passed);
  REQUIRE(report.trials.size() == 12);  // both operator families
  for (const auto& t : report.trials) {
    CHECK(t.passed);
    CHECK(t.max_abs_diff <= sccl::kForwardAgreementTol);
    CHECK(t.adjoint_gap <= sccl::kAdjointTol);
    CHECK(t.max_rel_grad_err <= settings.tol);
    CHECK_FALSE(t.config.empty());
  }
}

TEST_CASE("the default geometry sweep meets the tight per-operator bound") {
  // Within the small-instance envelope (channels <= 12, spatial <= 5,
  // batch <= 3) analytic and central-difference gradients agree to 1e-6
  // relative, a much tighter bar than the checker's default threshold.
  GradCheckSettings settings;  // max_channels=12, max_spatial=5, max_batch=3
  settings.trials = 20;
  settings.tol = 1e-6;
  const GradCheckReport report = sccl::grad_check_driver(settings);
  CHECK(report.all_passed);
  CHECK(report.trials.size() == 40);
}

TEST_CASE("gradient checker is deterministic") {
  GradCheckSettings settings;
  settings.trials = 3;
  settings.seed = 17;
  const GradCheckReport a = sccl::grad_check_driver(settings);
  const GradCheckReport b = sccl::grad_check_driver(settings);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].config == b.trials[i].config);
    CHECK(a.trials[i].max_rel_grad_err == b.trials[i].max_rel_grad_err);
    CHECK(a.trials[i].adjoint_gap == b.trials[i].adjoint_gap);
  }
}

TEST_CASE("a corrupted weight gradient is flagged") {
  GradCheckSettings settings;
  settings.trials = 4;
  settings.seed = 23;
  settings.weight_grad_hook = [](std::vector<double>& g) {
    // Nudge the largest entry by 1%: a wrong gradient the checker must see.
    auto it = std::max_element(g.begin(), g.end(), [](double a, double b) {
      return std::fabs(a) < std::fabs(b);
    });
    if (it != g.end()) *it *= 1.01;
  };
  const GradCheckReport report = sccl::grad_check_driver(settings);
  CHECK_FALSE(report.all_passed);
  std::int64_t failed = 0;
  for (const auto& t : report.trials) {
    if (!t.passed) ++failed;
  }
  CHECK(failed >= 1);
}

TEST_CASE("zero tolerance fails every trial") {
  GradCheckSettings settings;
  settings.trials = 2;
  settings.tol = 0.0;
  const GradCheckReport report = sccl::grad_check_driver(settings);
  CHECK_FALSE(report.all_passed);
  for (const auto& t : report.trials) CHECK_FALSE(t.passed);
}

TEST_CASE("settings validation") {
  GradCheckSettings settings;
  settings.trials = 0;
  CHECK_THROWS_AS(sccl::grad_check_driver(settings), sccl::ArgumentError);
  settings.trials = 1;
  settings.eps = 0.0;
  CHECK_THROWS_AS(sccl::grad_check_driver(settings), sccl::ArgumentError);
  settings.eps = 1e-5;
  settings.tol = -1.0;
  CHECK_THROWS_AS(sccl::grad_check_driver(settings), sccl::ArgumentError);
}

TEST_CASE("pinned geometry runs only the sliding-window suite") {
  GradCheckSettings settings;
  settings.trials = 3;
  settings.fixed_config =
      sccl::scc_config_new(6, 6, 2, sccl::Overlap::ratio(0.5), true);
  settings.fixed_spatial = 4;
  settings.fixed_batch = 2;
  const GradCheckReport report = sccl::grad_check_driver(settings);
  CHECK(report.all_passed);
  CHECK(report.trials.size() == 3);
}

TEST_CASE("finite difference helper agrees on a quadratic") {
  // loss(p) = p0^2 + 3 p1, gradient (2 p0, 3).
  std::vector<double> p = {1.5, -2.0};
  const std::vector<double> analytic = {3.0, 3.0};
  auto loss = [&p]() { return p[0] * p[0] + 3.0 * p[1]; };
  const double err =
      sccl::fd_max_rel_error(p.data(), 2, analytic.data(), 1e-5, loss);
  CHECK(err <= 1e-9);
  CHECK(p[0] == 1.5);
  CHECK(p[1] == -2.0);

  const std::vector<double> wrong = {4.0, 3.0};
  const double bad =
      sccl::fd_max_rel_error(p.data(), 2, wrong.data(), 1e-5, loss);
  CHECK(bad > 0.2);
}
