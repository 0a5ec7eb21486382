#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "otc/error.hpp"
#include "otc/models.hpp"
#include "otc/ode.hpp"
#include "otc/random_draws.hpp"
#include "otc/steady.hpp"

using namespace otc;
using namespace otc_test;

namespace {

// Independent oracle: plain bisection on a hand-simplified residual.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PartiallySegmentedParams benchmark_partseg_twin() {
  PartiallySegmentedParams q;
  q.lambda = {1.0};
  q.gamma_ui = {1.0};
  q.gamma_di = {1.0};
  q.gamma_tilde_ui = {1.0};
  q.gamma_tilde_di = {1.0};
  q.m = {0.2};
  return q;
}

}  // namespace

TEST_CASE("scalar residual: closed ends, simplified benchmark form") {
  const NonSegmentedParams p = benchmark_nonseg();

  // F(0) reduces to gamma_u (1 - sum m).
  CHECK(steady_scalar_residual(p, 0.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(steady_scalar_residual(p, 0.8) < 0.0);

  // Benchmark simplification: F(x) = 0.4/(x+2) + 0.6 - 2x.
  for (double x : {0.0, 0.1, 0.25, 0.38, 0.5, 0.8}) {
    const double simplified = 0.4 / (x + 2.0) + 0.6 - 2.0 * x;
    CHECK(std::abs(steady_scalar_residual(p, x) - simplified) < 1e-15);
  }
  CHECK(std::abs(steady_scalar_residual(p, kBenchmarkRoot)) < 1e-14);
}

TEST_CASE("scalar residual brackets and decreases for random draws") {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const NonSegmentedParams p = draw_nonsegmented(rng);
    const double c = 1.0 - p.total_mass();
    CHECK(steady_scalar_residual(p, 0.0) > 0.0);
    CHECK(steady_scalar_residual(p, c) < 0.0);
    double prev = steady_scalar_residual(p, 0.0);
    for (int j = 1; j <= 20; ++j) {
      const double fx = steady_scalar_residual(p, c * j / 20.0);
      CHECK(fx < prev);
      prev = fx;
    }
  }
}

TEST_CASE("non-segmented solver reproduces the benchmark steady state") {
  const SteadySolution sol = solve_nonsegmented(benchmark_nonseg(), 1e-12);
  CHECK(sol.method == SolveMethod::ScalarRoot);
  CHECK(sol.residual_inf_norm <= 1e-12);
  CHECK(std::abs(sol.state[nonseg::idx_hn] - kBenchmarkRoot) < 1e-12);
  CHECK(std::abs(sol.state[nonseg::idx_ln] - kBenchmarkLn) < 1e-12);
  CHECK(std::abs(sol.state[nonseg::idx_ho(0)] - kBenchmarkHio) < 1e-12);
  CHECK(std::abs(sol.state[nonseg::idx_lo(0)] - kBenchmarkLio) < 1e-12);
}

TEST_CASE("lambda = 0 degenerates to the affine solution") {
  NonSegmentedParams p = benchmark_nonseg();
  p.lambda = {0.0};
  const SteadySolution sol = solve_nonsegmented(p, 1e-12);
  // F is affine: gamma_u (1 - m) - gamma x.
  CHECK(std::abs(sol.state[nonseg::idx_hn] - 0.4) < 1e-14);
}

TEST_CASE("two-asset solver agrees with an independent bisection oracle") {
  NonSegmentedParams p;
  p.lambda = {1.0, 2.0};
  p.gamma_u = 1.0;
  p.gamma_d = 1.0;
  p.gamma_ui = {1.0, 1.0};
  p.gamma_di = {1.0, 1.0};
  p.m = {0.1, 0.2};

  // Hand simplification: F(x) = 0.2/(x+2) + 0.4/(2x+2) + 0.4 - 2x.
  const double oracle = bisect(
      [](double x) { return 0.2 / (x + 2.0) + 0.4 / (2.0 * x + 2.0) + 0.4 - 2.0 * x; },
      0.0, 0.7);

  const double tol = 1e-10;
  const SteadySolution sol = solve_nonsegmented(p, tol);
  CHECK(sol.state[nonseg::idx_hn] > 0.0);
  CHECK(sol.state[nonseg::idx_hn] < 0.7);
  CHECK(std::abs(sol.state[nonseg::idx_hn] - oracle) < tol);
  CHECK(std::abs(steady_scalar_residual(p, sol.state[nonseg::idx_hn])) <= tol);
  CHECK(sol.residual_inf_norm <= 10.0 * tol);
}

TEST_CASE("unreachable tolerances are reported, not looped on") {
  CHECK_THROWS_AS(solve_nonsegmented(benchmark_nonseg(), 1e-300), Error);
}

TEST_CASE("fixed-point map face values at one asset") {
  const PartiallySegmentedParams q = benchmark_partseg_twin();
  const std::vector<double> at_zero = fixed_point_map(q, {0.0});
  const std::vector<double> at_one = fixed_point_map(q, {1.0});
  // f(0) = -(gt_u/gt)(1 - m) = -0.4; f(1) = L + P > 0.
  CHECK(at_zero[0] == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(at_one[0] > 0.0);

  // The zero of f matches the scalar-root solution.
  const std::vector<double> zero = gauss_seidel_zero(q, {0.5}, 1e-12);
  CHECK(std::abs(zero[0] - kBenchmarkRoot) < 1e-10);
}

TEST_CASE("partially segmented solver matches the non-segmented one at K=1") {
  const SteadySolution a = solve_nonsegmented(benchmark_nonseg(), 1e-12);
  const SteadySolution b = solve_partially_segmented(benchmark_partseg_twin(), 1e-12);
  CHECK(b.method == SolveMethod::FixedPoint);
  CHECK(max_abs_diff(a.state.values, b.state.values) < 1e-10);
}

TEST_CASE("asset-swap symmetry of the two-asset fixed point") {
  PartiallySegmentedParams p;
  p.lambda = {1.0, 1.0};
  p.gamma_ui = {1.0, 1.0};
  p.gamma_di = {1.0, 1.0};
  p.gamma_tilde_ui = {1.0, 1.0};
  p.gamma_tilde_di = {1.0, 1.0};
  p.m = {0.1, 0.1};
  const SteadySolution sol = solve_partially_segmented(p, 1e-12);
  CHECK(std::abs(sol.state[partseg::idx_hn(0)] - sol.state[partseg::idx_hn(1)]) <
        1e-12);
  CHECK(sol.residual_inf_norm <= 1e-12);
}

TEST_CASE("multi-start iteration lands on a single zero") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < 5; ++draw) {
    const PartiallySegmentedParams p = draw_partially_segmented(rng);
    std::vector<double> reference;
    for (int start = 0; start < 16; ++start) {
      std::vector<double> x0(p.assets());
      for (double& v : x0) v = unit(rng);
      const std::vector<double> zero = gauss_seidel_zero(p, x0, 1e-12);
      if (reference.empty())
        reference = zero;
      else
        CHECK(max_abs_diff(reference, zero) < 1e-8);
    }
  }
}

TEST_CASE("reduced heterogeneous residual") {
  const HeterogeneousParams family = one_way_family(1.0);
  const double q = (std::sqrt(2.0) - 1.0) / 2.0;
  const double uz = 2.0 * q * q;

  SUBCASE("closed-form point zeroes every row") {
    const std::array<double, 6> res =
        reduced_residual_heterogeneous(family, {q, q, uz, uz, q, q});
    for (double r : res) CHECK(std::abs(r) < 1e-12);
  }

  SUBCASE("constraint rows vanish on any supply-correct simplex point") {
    HeterogeneousParams p = one_way_family(1.2);
    const std::array<double, 6> res =
        reduced_residual_heterogeneous(p, {0.1, 0.2, 0.2, 0.1, 0.2, 0.2});
    CHECK(std::abs(res[4]) < 1e-15);  // sums to one
    CHECK(std::abs(res[5]) < 1e-15);  // supply 0.2+0.2+2(0.2+0.2) = 1.2
  }

  SUBCASE("empty market with d0 active") {
    const std::array<double, 6> res =
        reduced_residual_heterogeneous(family, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(res[0] == 0.0);
  }
}

TEST_CASE("condition (P) corner evaluation") {
  HeterogeneousParams p = one_way_family(1.0);

  SUBCASE("c0=2, d0=1 gives condition 1 margin 1 on the unit box") {
    p.c[0] = 2.0;
    const ConditionPReport report = check_condition_P(p, Box::unit(6));
    CHECK(report.conditions[0].holds);
    CHECK(report.conditions[0].margin == doctest::Approx(1.0));
  }

  SUBCASE("a=0 kills the product in condition 2") {
    p.a = 0.0;
    p.b = 1.0;
    const ConditionPReport report = check_condition_P(p, Box::unit(6));
    CHECK(report.conditions[1].holds);
    CHECK(report.conditions[1].margin == doctest::Approx(0.0));
  }

  SUBCASE("the one-way family fails condition 1 at the worst corner") {
    const ConditionPReport report = check_condition_P(p, Box::unit(6));
    CHECK_FALSE(report.conditions[0].holds);
    CHECK(report.conditions[0].margin == doctest::Approx(-1.0));
    CHECK_FALSE(report.holds);
  }
}

TEST_CASE("closed-form root over the supply range") {
  CHECK(*closed_form_root(1.0) == doctest::Approx((std::sqrt(2.0) - 1.0) / 2.0)
                                      .epsilon(1e-15));
  REQUIRE(closed_form_root(1.5).has_value());
  CHECK(*closed_form_root(1.5) == 0.0);  // boundary: 2s - 3 = 0
  CHECK_FALSE(closed_form_root(1.75).has_value());
  CHECK(*closed_form_root(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(closed_form_root(2.5), Error);
}

TEST_CASE("heterogeneous solver: one-way family") {
  SUBCASE("s=1 recovers the closed-form steady state") {
    const HeterogeneousOutcome outcome = solve_heterogeneous(one_way_family(1.0), 1e-10);
    REQUIRE(outcome.found());
    CHECK(outcome.solution->method == SolveMethod::ClosedForm);
    const double q = (std::sqrt(2.0) - 1.0) / 2.0;
    const StateDistribution& mu = outcome.solution->state;
    CHECK(std::abs(mu[het::idx_h0] - q) < 1e-12);
    CHECK(std::abs(mu[het::idx_h1] - q) < 1e-12);
    CHECK(std::abs(mu[het::idx_l1] - q) < 1e-12);
    CHECK(std::abs(mu[het::idx_l2] - q) < 1e-12);
    CHECK(std::abs(mu[het::idx_h2] - 2.0 * q * q) < 1e-12);
    CHECK(std::abs(mu[het::idx_l0] - 2.0 * q * q) < 1e-12);
    CHECK(outcome.solution->residual_inf_norm <= 1e-10);

    const std::array<double, 6> reduced = reduced_residual_heterogeneous(
        one_way_family(1.0), {mu[0], mu[1], mu[2], mu[3], mu[4], mu[5]});
    for (double r : reduced) CHECK(std::abs(r) <= 1e-10);
  }

  SUBCASE("s in the no-root range reports no steady state") {
    for (double s : {1.6, 1.75, 1.9}) {
      const HeterogeneousOutcome outcome = solve_heterogeneous(one_way_family(s), 1e-10);
      CHECK_FALSE(outcome.found());
      REQUIRE(outcome.no_steady_state.has_value());
      CHECK(outcome.no_steady_state->reason.find("root") != std::string::npos);
    }
  }

  SUBCASE("s=1.5 sits exactly on the boundary and still solves") {
    const HeterogeneousOutcome outcome = solve_heterogeneous(one_way_family(1.5), 1e-10);
    REQUIRE(outcome.found());
    CHECK(outcome.solution->state[het::idx_h0] == 0.0);
    CHECK(std::abs(outcome.solution->state[het::idx_l1] - 0.5) < 1e-12);
  }
}

TEST_CASE("heterogeneous solver: symmetric rates against ODE relaxation") {
  HeterogeneousParams p;
  p.lambda = 1.0;
  p.a = 0.5;
  p.b = 0.5;
  p.c = {1.0, 1.0, 1.0};
  p.d = {1.0, 1.0, 1.0};
  p.s = 1.0;

  const HeterogeneousOutcome outcome = solve_heterogeneous(p, 1e-10);
  REQUIRE(outcome.found());
  CHECK(outcome.solution->residual_inf_norm <= 1e-10);

  const RelaxationReport relax =
      relax_to_steady(make_rhs(p), default_initial_state(p), 1e-10, 1e4, 1e-3);
  REQUIRE(relax.converged);
  CHECK(max_abs_diff(outcome.solution->state.values, relax.final_state.values) < 1e-6);
}

TEST_CASE("reduction soundness: reduced zeros are master-equation zeros") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const HeterogeneousParams p = draw_heterogeneous(rng);
    const HeterogeneousOutcome outcome = solve_heterogeneous(p, 1e-10);
    if (!outcome.found()) continue;
    const StateDistribution& mu = outcome.solution->state;
    const std::array<double, 6> reduced = reduced_residual_heterogeneous(
        p, {mu[0], mu[1], mu[2], mu[3], mu[4], mu[5]});
    double reduced_norm = 0.0;
    for (double r : reduced) reduced_norm = std::max(reduced_norm, std::abs(r));
    CHECK(reduced_norm <= 2e-10);
    CHECK(inf_norm(rhs_heterogeneous(p, mu)) <= 2e-10);
  }
}

TEST_CASE("cross-method agreement on random draws") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const NonSegmentedParams p = draw_nonsegmented(rng);
    const SteadySolution sol = solve_nonsegmented(p, 1e-12);
    const RelaxationReport relax =
        relax_to_steady(make_rhs(p), default_initial_state(p), 1e-10, 1e4, 1e-3);
    REQUIRE(relax.converged);
    CHECK(max_abs_diff(sol.state.values, relax.final_state.values) <= 1e-6);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const PartiallySegmentedParams p = draw_partially_segmented(rng);
    const SteadySolution sol = solve_partially_segmented(p, 1e-12);
    const RelaxationReport relax =
        relax_to_steady(make_rhs(p), default_initial_state(p), 1e-10, 1e4, 1e-3);
    REQUIRE(relax.converged);
    CHECK(max_abs_diff(sol.state.values, relax.final_state.values) <= 1e-6);
  }
}
