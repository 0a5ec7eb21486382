#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otc/params.hpp"

namespace otc {

enum class ModelClass { NonSegmented, PartiallySegmented, Heterogeneous };

const char* to_string(ModelClass mc);
ModelClass model_class_from_string(const std::string& name);

// A probability vector over the model's state space, in the frozen
// serialization order documented below.
struct StateDistribution {
  ModelClass model_class = ModelClass::NonSegmented;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Frozen component orders.
//
// non-segmented:        (h,n), (l,n), (h1,o), (l1,o), ..., (hK,o), (lK,o)
// partially segmented:  (h1,n), ..., (hK,n), (l,n), (h1,o), (l1,o), ...
// heterogeneous:        (h,0), (h,1), (h,2), (l,0), (l,1), (l,2)
//                       written x, y, z, u, v, w in shorthand
namespace nonseg {
inline constexpr std::size_t idx_hn = 0;
inline constexpr std::size_t idx_ln = 1;
inline std::size_t idx_ho(std::size_t i) { return 2 + 2 * i; }
inline std::size_t idx_lo(std::size_t i) { return 3 + 2 * i; }
inline std::size_t dim(std::size_t K) { return 2 + 2 * K; }
}  // namespace nonseg

namespace partseg {
inline std::size_t idx_hn(std::size_t i) { return i; }
inline std::size_t idx_ln(std::size_t K) { return K; }
inline std::size_t idx_ho(std::size_t K, std::size_t i) { return K + 1 + 2 * i; }
inline std::size_t idx_lo(std::size_t K, std::size_t i) { return K + 2 + 2 * i; }
inline std::size_t dim(std::size_t K) { return 1 + 3 * K; }
}  // namespace partseg

namespace het {
inline constexpr std::size_t idx_h0 = 0;  // x
inline constexpr std::size_t idx_h1 = 1;  // y
inline constexpr std::size_t idx_h2 = 2;  // z
inline constexpr std::size_t idx_l0 = 3;  // u
inline constexpr std::size_t idx_l1 = 4;  // v
inline constexpr std::size_t idx_l2 = 5;  // w
inline constexpr std::size_t dim = 6;
}  // namespace het

// Column names in serialization order: mu_h_n, mu_l_n, mu_h1_o, ... for the
// binary-position models; x, y, z, u, v, w for the heterogeneous model.
std::vector<std::string> component_names(ModelClass mc, std::size_t assets);

// Deviations from the model's linear constraints at the given point:
// element 0 is sum(values) - 1, followed by the per-asset owner-mass gaps
// (binary-position models) or the supply gap (heterogeneous model).
std::vector<double> constraint_residuals(const NonSegmentedParams& p,
                                         const StateDistribution& mu);
std::vector<double> constraint_residuals(const PartiallySegmentedParams& p,
                                         const StateDistribution& mu);
std::vector<double> constraint_residuals(const HeterogeneousParams& p,
                                         const StateDistribution& mu);

// Throws InvalidInitialState unless mu has the right dimension, components in
// [-tol, 1+tol] and all constraint residuals within tol.
void check_distribution(const NonSegmentedParams& p, const StateDistribution& mu,
                        double tol = 1e-12);
void check_distribution(const PartiallySegmentedParams& p, const StateDistribution& mu,
                        double tol = 1e-12);
void check_distribution(const HeterogeneousParams& p, const StateDistribution& mu,
                        double tol = 1e-12);

// A simple valid starting point: owner masses split evenly between high and
// low types, non-owner mass split evenly as well.
StateDistribution default_initial_state(const NonSegmentedParams& p);
StateDistribution default_initial_state(const PartiallySegmentedParams& p);
StateDistribution default_initial_state(const HeterogeneousParams& p);

}  // namespace otc
