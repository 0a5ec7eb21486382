#pragma once

#include <cstddef>
#include <random>

#include "otc/params.hpp"
#include "otc/state.hpp"

namespace otc {

// Seeded random parameter and state draws used by the verification suites.
// Rates are uniform in [0.1, 10], total asset mass uniform in [0.05, 0.9]
// split randomly across assets, supply uniform in [0.1, 1.9].

NonSegmentedParams draw_nonsegmented(std::mt19937_64& rng, std::size_t k_min = 1,
                                     std::size_t k_max = 5);
PartiallySegmentedParams draw_partially_segmented(std::mt19937_64& rng,
                                                  std::size_t k_min = 1,
                                                  std::size_t k_max = 5);
HeterogeneousParams draw_heterogeneous(std::mt19937_64& rng);

// Random valid distributions (constraints satisfied exactly up to rounding).
StateDistribution draw_state(const NonSegmentedParams& p, std::mt19937_64& rng);
StateDistribution draw_state(const PartiallySegmentedParams& p, std::mt19937_64& rng);
StateDistribution draw_state(const HeterogeneousParams& p, std::mt19937_64& rng);

}  // namespace otc
