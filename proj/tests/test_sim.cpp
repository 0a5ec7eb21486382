#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "otc/error.hpp"
#include "otc/models.hpp"
#include "otc/ode.hpp"
#include "otc/random_draws.hpp"
#include "otc/sim.hpp"

using namespace otc;
using namespace otc_test;

TEST_CASE("empirical distribution is the exact count ratio") {
  Population pop;
  pop.model_class = ModelClass::NonSegmented;
  pop.states = {0, 0, 1, 1};
  pop.counts = {2, 2, 0, 0};
  const StateDistribution mu = empirical_distribution(pop);
  CHECK(mu.values == std::vector<double>{0.5, 0.5, 0.0, 0.0});

  Population odd;
  odd.model_class = ModelClass::NonSegmented;
  odd.states = {0, 1, 1};
  odd.counts = {1, 2, 0, 0};
  double sum = 0.0;
  for (double v : empirical_distribution(odd).values) sum += v;
  CHECK(std::abs(sum - 1.0) < 4e-16);
}

TEST_CASE("rounding respects class totals and integer supply") {
  const NonSegmentedParams p = benchmark_nonseg();
  const Population pop = round_to_population(p, default_initial_state(p), 1001);
  CHECK(pop.n() == 1001);
  std::size_t owners = pop.counts[nonseg::idx_ho(0)] + pop.counts[nonseg::idx_lo(0)];
  CHECK(owners == 200);  // round(1001 * 0.2)

  const HeterogeneousParams h = one_way_family(1.3);
  const Population hp = round_to_population(h, default_initial_state(h), 777);
  CHECK(hp.n() == 777);
  const long long holdings =
      static_cast<long long>(hp.counts[het::idx_h1] + hp.counts[het::idx_l1]) +
      2LL * static_cast<long long>(hp.counts[het::idx_h2] + hp.counts[het::idx_l2]);
  CHECK(holdings == std::llround(777 * 1.3));

  CHECK_THROWS_AS(round_to_population(p, default_initial_state(p), 1), Error);

  // Partially segmented: the non-owner mass spreads over K+1 states with the
  // (l,n) slot absorbing the surplus, owner classes exact per asset.
  PartiallySegmentedParams ps;
  ps.lambda = {1.0, 1.0};
  ps.gamma_ui = {1.0, 1.0};
  ps.gamma_di = {1.0, 1.0};
  ps.gamma_tilde_ui = {1.0, 1.0};
  ps.gamma_tilde_di = {1.0, 1.0};
  ps.m = {0.15, 0.25};
  const Population pp = round_to_population(ps, default_initial_state(ps), 503);
  CHECK(pp.n() == 503);
  CHECK(pp.counts[partseg::idx_ho(2, 0)] + pp.counts[partseg::idx_lo(2, 0)] ==
        std::size_t(std::llround(503 * 0.15)));
  CHECK(pp.counts[partseg::idx_ho(2, 1)] + pp.counts[partseg::idx_lo(2, 1)] ==
        std::size_t(std::llround(503 * 0.25)));
}

TEST_CASE("identical seeds reproduce identical runs") {
  const NonSegmentedParams p = benchmark_nonseg();
  const StateDistribution state0 = default_initial_state(p);
  const SimulationResult a = simulate(p, state0, 300, 20.0, 1.0, 42);
  const SimulationResult b = simulate(p, state0, 300, 20.0, 1.0, 42);
  CHECK(a.event_count == b.event_count);
  REQUIRE(a.empirical.size() == b.empirical.size());
  for (std::size_t i = 0; i < a.empirical.size(); ++i)
    CHECK(a.empirical[i].values == b.empirical[i].values);  // bitwise

  const SimulationResult c = simulate(p, state0, 300, 20.0, 1.0, 43);
  CHECK(a.event_count != c.event_count);
}

TEST_CASE("absorbing owner block never moves") {
  NonSegmentedParams p = benchmark_nonseg();
  p.gamma_di = {0.0};  // owners never turn low; no (l,o) mass, so no trades
  StateDistribution state0 = nonseg_state({0.4, 0.4, 0.2, 0.0});
  const SimulationResult result = simulate(p, state0, 500, 30.0, 1.0, 7);
  for (const StateDistribution& snap : result.empirical) {
    CHECK(snap[nonseg::idx_ho(0)] == 0.2);
    CHECK(snap[nonseg::idx_lo(0)] == 0.0);
  }
}

TEST_CASE("two investors: the trade wins the exponential race") {
  NonSegmentedParams p;
  p.lambda = {1.0};
  p.gamma_u = 1e-9;
  p.gamma_d = 1e-9;
  p.gamma_ui = {1e-9};
  p.gamma_di = {1e-9};
  p.m = {0.5};

  Population start;
  start.model_class = ModelClass::NonSegmented;
  start.states = {static_cast<std::uint8_t>(nonseg::idx_hn),
                  static_cast<std::uint8_t>(nonseg::idx_lo(0))};
  start.counts = {1, 0, 0, 1};

  // Pair rate lambda/N = 0.5; switching rates are ~1e-9, so the first event
  // is the trade and the pair lands in (h1,o), (l,n).
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const SimulationResult result = simulate(p, start, 100.0, 100.0, seed);
    const StateDistribution& final_state = result.empirical.back();
    CHECK(final_state[nonseg::idx_ho(0)] == 0.5);
    CHECK(final_state[nonseg::idx_ln] == 0.5);
  }
}

TEST_CASE("mean first-event time matches the configured rate") {
  // Single enabled transition: one high non-owner decaying at gamma_d = 0.7;
  // gamma_u = 0 freezes the chain afterwards. Detection on a 0.01 grid, so
  // half a cell is subtracted from the detected time.
  NonSegmentedParams p;
  p.lambda = {1e-300};
  p.gamma_u = 1e-300;
  p.gamma_d = 0.7;
  p.gamma_ui = {1e-300};
  p.gamma_di = {1e-300};
  p.m = {0.5};

  Population start;
  start.model_class = ModelClass::NonSegmented;
  start.states = {static_cast<std::uint8_t>(nonseg::idx_hn),
                  static_cast<std::uint8_t>(nonseg::idx_ho(0))};
  start.counts = {1, 0, 1, 0};

  const int reps = 10000;
  const double grid = 0.01, t_end = 12.0;
  double sum = 0.0;
  int detected = 0;
  for (int rep = 1; rep <= reps; ++rep) {
    const SimulationResult result =
        simulate(p, start, t_end, grid, static_cast<std::uint64_t>(rep));
    for (std::size_t i = 0; i < result.empirical.size(); ++i) {
      if (result.empirical[i][nonseg::idx_hn] == 0.0) {
        sum += result.sample_times[i] - 0.5 * grid;
        ++detected;
        break;
      }
    }
  }
  CHECK(detected > reps * 999 / 1000);
  const double mean = sum / detected;
  const double expected = 1.0 / 0.7;
  const double stderr3 = 3.0 * expected / std::sqrt(static_cast<double>(detected));
  CHECK(std::abs(mean - expected) < stderr3);
}

TEST_CASE("conserved tallies stay fixed across snapshots") {
  std::mt19937_64 rng(8);
  const HeterogeneousParams p = draw_heterogeneous(rng);
  const StateDistribution state0 = draw_state(p, rng);
  const std::size_t n = 600;
  const SimulationResult result = simulate(p, state0, n, 25.0, 0.5, 99);

  const auto holdings_of = [](const StateDistribution& s, std::size_t n_pop) {
    return std::llround(static_cast<double>(n_pop) *
                        (s[het::idx_h1] + s[het::idx_l1] +
                         2.0 * (s[het::idx_h2] + s[het::idx_l2])));
  };
  const long long first = holdings_of(result.empirical.front(), n);
  for (const StateDistribution& snap : result.empirical) {
    CHECK(holdings_of(snap, n) == first);
    double sum = 0.0;
    for (double v : snap.values) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("empirical trajectory approaches the mean-field flow as N grows") {
  const NonSegmentedParams p = benchmark_nonseg();
  const StateDistribution state0 = default_initial_state(p);
  const double t_end = 50.0;
  const Trajectory ode = integrate(make_rhs(p), state0, t_end, 1e-3, 1.0);

  const auto median_sup = [&](std::size_t n) {
    std::vector<double> sups;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      sups.push_back(
          compare_to_meanfield(simulate(p, state0, n, t_end, 1.0, seed), ode).sup);
    std::sort(sups.begin(), sups.end());
    return sups[sups.size() / 2];
  };
  CHECK(median_sup(400) > median_sup(6400));
}

TEST_CASE("frozen dynamics stay at distance zero from the mean field") {
  // All rates zero: no events ever fire, and N is chosen so the initial
  // state rounds to exact counts.
  NonSegmentedParams p;
  p.lambda = {0.0};
  p.gamma_u = p.gamma_d = 0.0;
  p.gamma_ui = {0.0};
  p.gamma_di = {0.0};
  p.m = {0.2};
  const StateDistribution state0 = nonseg_state({0.4, 0.4, 0.1, 0.1});
  const SimulationResult sim = simulate(p, state0, 100, 10.0, 1.0, 3);
  CHECK(sim.event_count == 0);
  const Trajectory ode = integrate(make_rhs(p), state0, 10.0, 1e-3, 1.0);
  CHECK(compare_to_meanfield(sim, ode).sup == 0.0);
}

TEST_CASE("grid mismatches are rejected") {
  const NonSegmentedParams p = benchmark_nonseg();
  const StateDistribution state0 = default_initial_state(p);
  const SimulationResult sim = simulate(p, state0, 100, 10.0, 1.0, 5);
  const Trajectory coarse = integrate(make_rhs(p), state0, 10.0, 1e-3, 2.0);
  CHECK_THROWS_AS(compare_to_meanfield(sim, coarse), Error);

  const Trajectory matching = integrate(make_rhs(p), state0, 10.0, 1e-3, 1.0);
  const MeanFieldComparison cmp = compare_to_meanfield(sim, matching);
  CHECK(cmp.sup >= 0.0);
  CHECK(cmp.per_time.size() == sim.sample_times.size());

  // Reflexivity: comparing the empirical series against itself gives zero.
  Trajectory self;
  self.times = sim.sample_times;
  self.states = sim.empirical;
  CHECK(compare_to_meanfield(sim, self).sup == 0.0);
}
