#pragma once

#include <vector>

#include "otc/models.hpp"
#include "otc/state.hpp"

namespace otc {

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kDefaultRelaxTol = 1e-10;
inline constexpr double kDefaultRelaxTMax = 1e4;

struct Trajectory {
  std::vector<double> times;
  std::vector<StateDistribution> states;
};

struct RelaxationReport {
  StateDistribution final_state;
  double residual_inf_norm = 0.0;
  double elapsed_model_time = 0.0;
  bool converged = false;
};

// Classical fourth-order fixed-step integration, sampled every
// `sample_every` time units (snapped to whole steps) plus the final state at
// t_end. Components in (-1e-9, 0) are clamped to zero in the samples only;
// a sampled component outside [0,1] by more than 1e-9 raises StepTooLarge.
Trajectory integrate(const RhsFn& rhs, const StateDistribution& state0,
                     double t_end, double step = kDefaultStep,
                     double sample_every = 1.0);

// Integrates until the residual ||rhs(mu_t)||_inf drops to tol or t_max is
// reached. Convergence is judged on the residual itself, re-evaluated at the
// current state before every step.
RelaxationReport relax_to_steady(const RhsFn& rhs, const StateDistribution& state0,
                                 double tol = kDefaultRelaxTol,
                                 double t_max = kDefaultRelaxTMax,
                                 double step = kDefaultStep);

}  // namespace otc
