#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otc/box.hpp"
#include "otc/params.hpp"
#include "otc/poincare_miranda.hpp"
#include "otc/state.hpp"

namespace otc {

enum class SolveMethod { ScalarRoot, FixedPoint, PoincareMiranda, ClosedForm };
const char* to_string(SolveMethod m);

struct SteadySolution {
  StateDistribution state;
  double residual_inf_norm = 0.0;
  SolveMethod method = SolveMethod::ScalarRoot;
  // Volume of the final certified box; present only when the zero was
  // localized by fully certified subdivision.
  std::optional<double> certified_box_volume;
};

// Scalar stationarity function for the non-segmented model, the reduced
// equation in x = mu(h,n):
//   F(x) = sum_i gamma_i gamma_di m_i / (lambda_i x + gamma_i)
//          - sum_i gamma_di m_i + gamma_u (1 - sum_i m_i) - gamma x.
// F(0) > 0, F(1 - sum m) < 0, and F is strictly decreasing on x >= 0, so the
// root is bracketed and unique.
double steady_scalar_residual(const NonSegmentedParams& p, double x);

// Bisects the scalar residual on [0, 1 - sum m] to bracket width tol, then
// polishes with safeguarded Newton steps before back-substituting the full
// distribution. Throws ToleranceUnreachable when tol is below the bracket's
// floating-point resolution.
SteadySolution solve_nonsegmented(const NonSegmentedParams& p, double tol = 1e-12);

// Fixed-point map for the partially segmented model: f_i(x) = 0 at the
// steady values x_i = mu(hi,n).
std::vector<double> fixed_point_map(const PartiallySegmentedParams& p,
                                    const std::vector<double>& x);

inline constexpr double kGaussSeidelDamping = 0.5;

// Damped Gauss-Seidel on the explicit update form of the fixed-point map,
// with certified subdivision as fallback when iteration stalls. `start`
// overrides the default interior starting point (used for multi-start runs).
SteadySolution solve_partially_segmented(const PartiallySegmentedParams& p,
                                         double tol = 1e-12);
std::vector<double> gauss_seidel_zero(const PartiallySegmentedParams& p,
                                      std::vector<double> start, double tol,
                                      std::size_t max_sweeps = 20000);

// Residual of the reduced six-equation heterogeneous system at the point
// (x,y,z,u,v,w); the last two components are the constraint rows.
std::array<double, 6> reduced_residual_heterogeneous(const HeterogeneousParams& p,
                                                     const std::array<double, 6>& point);

// Four-inequality sufficient condition for the heterogeneous steady state,
// evaluated in the worst case over the box. Each inequality is affine in
// every variable so corner evaluation is exact. The set over which the
// inequalities are required is an interpretation: worst case over the given
// search box.
struct ConditionPReport {
  struct Item {
    bool holds = false;
    double margin = 0.0;  // slack in the favorable direction; >= 0 iff holds
  };
  bool holds = false;
  std::array<Item, 4> conditions;
};

ConditionPReport check_condition_P(const HeterogeneousParams& p, const Box& box);

// Closed-form nonnegative root of the one-parameter branch x = y, v = w of
// the reduced system for the one-way switching family
//   c = (0,0,1), d = (1,0,0), a = 1, b = 0, lambda = 1:
// x solves 4x^2 + 4sx + 2s - 3 = 0, absent when the admissible root is
// negative.
std::optional<double> closed_form_root(double s);
bool is_closed_form_family(const HeterogeneousParams& p);

struct NoSteadyStateInfo {
  std::string reason;
  std::size_t restarts_tried = 0;
  double best_residual = 0.0;
};

// Exactly one of the two members is engaged. Non-existence is an answer,
// not an error.
struct HeterogeneousOutcome {
  std::optional<SteadySolution> solution;
  std::optional<NoSteadyStateInfo> no_steady_state;

  bool found() const { return solution.has_value(); }
};

// Eliminates u and z through the two constraint rows and locates a zero of
// the remaining four equations over [0,1]^4: subdivision first, then damped
// Newton iteration from 32 deterministic restarts. The one-way switching
// family is resolved by the closed-form root, whose sign is conclusive.
HeterogeneousOutcome solve_heterogeneous(const HeterogeneousParams& p,
                                         double tol = 1e-10);

}  // namespace otc
