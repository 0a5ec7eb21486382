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

TEST_CASE("t_end = 0 returns only the initial state") {
  const NonSegmentedParams p = benchmark_nonseg();
  const Trajectory traj =
      integrate(make_rhs(p), default_initial_state(p), 0.0, 1e-3, 1.0);
  REQUIRE(traj.times.size() == 1);
  CHECK(traj.times[0] == 0.0);
  CHECK(traj.states[0].values == default_initial_state(p).values);
}

TEST_CASE("lambda = 0 relaxation follows the closed-form linear solution") {
  NonSegmentedParams p = benchmark_nonseg();
  p.lambda = {0.0};
  const StateDistribution state0 = nonseg_state({0.8, 0.0, 0.2, 0.0});
  const Trajectory traj = integrate(make_rhs(p), state0, 4.0, 1e-3, 0.5);

  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    // Non-owners relax toward gamma_u/(gamma_u+gamma_d) of the free mass 0.8,
    // owners toward half of m; both with rate gamma_u + gamma_d = 2.
    const double hn = 0.4 + 0.4 * std::exp(-2.0 * t);
    const double ho = 0.1 + 0.1 * std::exp(-2.0 * t);
    CHECK(std::abs(traj.states[i][nonseg::idx_hn] - hn) < 1e-10);
    CHECK(std::abs(traj.states[i][nonseg::idx_ho(0)] - ho) < 1e-10);
  }
  CHECK(traj.times.back() == 4.0);
}

TEST_CASE("constraints drift below 1e-9 over long horizons") {
  std::mt19937_64 rng(42);
  const NonSegmentedParams p = draw_nonsegmented(rng);
  const StateDistribution state0 = draw_state(p, rng);
  const Trajectory traj = integrate(make_rhs(p), state0, 100.0, 1e-3, 1.0);

  const std::vector<double> initial = constraint_residuals(p, traj.states.front());
  for (const StateDistribution& s : traj.states) {
    const std::vector<double> res = constraint_residuals(p, s);
    for (std::size_t i = 0; i < res.size(); ++i)
      CHECK(std::abs(res[i] - initial[i]) <= 1e-9);
  }
}

TEST_CASE("halving the step shrinks the terminal error at fourth order") {
  const NonSegmentedParams p = benchmark_nonseg();
  const StateDistribution state0 = default_initial_state(p);
  const double t_end = 5.0;

  const auto terminal = [&](double step) {
    return integrate(make_rhs(p), state0, t_end, step, t_end).states.back().values;
  };
  const std::vector<double> coarse = terminal(0.08);
  const std::vector<double> half = terminal(0.04);
  const std::vector<double> reference = terminal(0.01);

  const double err_coarse = max_abs_diff(coarse, reference);
  const double err_half = max_abs_diff(half, reference);
  CHECK(err_coarse / err_half >= 8.0);
}

TEST_CASE("relaxation stops immediately on an exact steady state") {
  const NonSegmentedParams p = benchmark_nonseg();
  const SteadySolution sol = solve_nonsegmented(p, 1e-13);
  const RelaxationReport report =
      relax_to_steady(make_rhs(p), sol.state, 1e-10, 1e4, 1e-3);
  CHECK(report.converged);
  CHECK(report.elapsed_model_time == 0.0);
}

TEST_CASE("relaxation reaches the scalar-root steady state") {
  const NonSegmentedParams p = benchmark_nonseg();
  const RelaxationReport report =
      relax_to_steady(make_rhs(p), default_initial_state(p), 1e-10, 1e4, 1e-3);
  REQUIRE(report.converged);
  CHECK(report.residual_inf_norm <= 1e-10);
  CHECK(std::abs(report.final_state[nonseg::idx_hn] - kBenchmarkRoot) < 1e-8);

  // Independent recheck of the reported residual.
  CHECK(inf_norm(rhs_nonsegmented(p, report.final_state)) <= 1e-10);
}

TEST_CASE("one-way family with s=1.75 yields a report, not an error") {
  const HeterogeneousParams p = one_way_family(1.75);
  const RelaxationReport report =
      relax_to_steady(make_rhs(p), default_initial_state(p), 1e-10, 200.0, 1e-3);
  // The trajectory drains every high-liquidity state; whether the residual
  // crosses the tolerance inside t_max is reported, never thrown.
  if (report.converged) CHECK(report.residual_inf_norm <= 1e-10);
  CHECK(report.elapsed_model_time <= 200.0);
}

TEST_CASE("oversized steps are rejected rather than silently sampled") {
  const NonSegmentedParams p = benchmark_nonseg();
  CHECK_THROWS_AS(
      integrate(make_rhs(p), nonseg_state({0.8, 0.0, 0.2, 0.0}), 40.0, 2.5, 2.5),
      Error);
}

TEST_CASE("invalid initial states are rejected") {
  const NonSegmentedParams p = benchmark_nonseg();
  CHECK_THROWS_AS(integrate(make_rhs(p), nonseg_state({0.9, 0.4, 0.1, 0.1}), 1.0),
                  Error);
  CHECK_THROWS_AS(integrate(make_rhs(p), default_initial_state(p), 1.0, -0.1), Error);
}
