#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "otc/params.hpp"
#include "otc/state.hpp"

namespace otc {

// Right-hand sides of the constrained master equations. Each returns the
// full derivative vector in the frozen component order. The derivative sums
// to zero and preserves every linear constraint by construction.
std::vector<double> rhs_nonsegmented(const NonSegmentedParams& p,
                                     const StateDistribution& mu);
std::vector<double> rhs_partially_segmented(const PartiallySegmentedParams& p,
                                            const StateDistribution& mu);
std::vector<double> rhs_heterogeneous(const HeterogeneousParams& p,
                                      const StateDistribution& mu);

using RhsFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Bound derivative evaluators for the ODE engine.
RhsFn make_rhs(const NonSegmentedParams& p);
RhsFn make_rhs(const PartiallySegmentedParams& p);
RhsFn make_rhs(const HeterogeneousParams& p);

// Per-investor transition rates m(from; to) evaluated at a population
// distribution. Entries cover every structurally possible transition, even
// when its current rate evaluates to zero; pairs not listed have rate zero.
struct TransitionKernel {
  struct Entry {
    std::size_t from;
    std::size_t to;
    double rate;
  };
  std::size_t n_states = 0;
  std::vector<Entry> entries;

  double rate(std::size_t from, std::size_t to) const;
};

TransitionKernel kernel(const NonSegmentedParams& p, const StateDistribution& mu);
TransitionKernel kernel(const PartiallySegmentedParams& p, const StateDistribution& mu);
TransitionKernel kernel(const HeterogeneousParams& p, const StateDistribution& mu);

// Mean-field drift induced by a kernel: net rate-weighted probability flow
// into each state. Coincides with the matching rhs_* evaluation.
std::vector<double> kernel_drift(const TransitionKernel& k, const StateDistribution& mu);

}  // namespace otc
