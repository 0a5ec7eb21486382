#pragma once

#include <cstdint>
#include <vector>

#include "otc/ode.hpp"
#include "otc/params.hpp"
#include "otc/state.hpp"

namespace otc {

// Finite-N roster of investor states. `counts` is a redundant tally kept
// consistent with `states`.
struct Population {
  ModelClass model_class = ModelClass::NonSegmented;
  std::vector<std::uint8_t> states;  // per-investor state index
  std::vector<std::size_t> counts;   // per-state tally

  std::size_t n() const { return states.size(); }
};

struct SimulationResult {
  std::vector<double> sample_times;
  std::vector<StateDistribution> empirical;  // counts / N snapshots
  std::uint64_t event_count = 0;
  std::uint64_t seed = 0;
};

// Largest-remainder rounding of N * mu to integer counts. Class totals
// (owner mass per asset, or holdings per position class plus the total
// supply) are rounded first; the low-type state of each class absorbs the
// within-class surplus. Throws InfeasibleInitial when no integer roster can
// satisfy the constraints.
Population round_to_population(const NonSegmentedParams& p,
                               const StateDistribution& mu, std::size_t N);
Population round_to_population(const PartiallySegmentedParams& p,
                               const StateDistribution& mu, std::size_t N);
Population round_to_population(const HeterogeneousParams& p,
                               const StateDistribution& mu, std::size_t N);

StateDistribution empirical_distribution(const Population& pop);

// Event-driven exact simulation of the N-investor jump process. Autonomous
// switches fire per investor at the tabulated rates; each unordered
// compatible pair meets at rate lambda_i / N, so the quadratic mean-field
// terms emerge in the large-N limit. Deterministic given the seed: the
// generator is std::mt19937_64 seeded directly, uniforms take the top 53
// bits, exponentials and categorical picks use inverse transforms.
SimulationResult simulate(const NonSegmentedParams& p, const Population& initial,
                          double t_end, double sample_every, std::uint64_t seed);
SimulationResult simulate(const PartiallySegmentedParams& p, const Population& initial,
                          double t_end, double sample_every, std::uint64_t seed);
SimulationResult simulate(const HeterogeneousParams& p, const Population& initial,
                          double t_end, double sample_every, std::uint64_t seed);

SimulationResult simulate(const NonSegmentedParams& p, const StateDistribution& initial,
                          std::size_t N, double t_end, double sample_every,
                          std::uint64_t seed);
SimulationResult simulate(const PartiallySegmentedParams& p, const StateDistribution& initial,
                          std::size_t N, double t_end, double sample_every,
                          std::uint64_t seed);
SimulationResult simulate(const HeterogeneousParams& p, const StateDistribution& initial,
                          std::size_t N, double t_end, double sample_every,
                          std::uint64_t seed);

struct MeanFieldComparison {
  std::vector<double> times;
  std::vector<double> per_time;       // max-component |empirical - ode| per sample
  std::vector<double> component_sup;  // per-component sup over the samples
  double sup = 0.0;
};

// Componentwise sup distance between empirical snapshots and an ODE
// trajectory on the same sampling grid. Throws GridMismatch when the grids
// differ (times compared to 1e-9).
MeanFieldComparison compare_to_meanfield(const SimulationResult& sim,
                                         const Trajectory& ode);

}  // namespace otc
