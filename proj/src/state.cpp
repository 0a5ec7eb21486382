#include "otc/state.hpp"

#include <cmath>
#include <string>

#include "otc/error.hpp"

namespace otc {

const char* to_string(ModelClass mc) {
  switch (mc) {
    case ModelClass::NonSegmented: return "non-segmented";
    case ModelClass::PartiallySegmented: return "partially-segmented";
    case ModelClass::Heterogeneous: return "heterogeneous";
  }
  return "?";
}

ModelClass model_class_from_string(const std::string& name) {
  if (name == "non-segmented") return ModelClass::NonSegmented;
  if (name == "partially-segmented") return ModelClass::PartiallySegmented;
  if (name == "heterogeneous") return ModelClass::Heterogeneous;
  fail(ErrorCode::ConfigParse, "unknown model class '" + name + "'");
}

std::vector<std::string> component_names(ModelClass mc, std::size_t assets) {
  std::vector<std::string> names;
  switch (mc) {
    case ModelClass::NonSegmented:
      names.push_back("mu_h_n");
      names.push_back("mu_l_n");
      for (std::size_t i = 0; i < assets; ++i) {
        names.push_back("mu_h" + std::to_string(i + 1) + "_o");
        names.push_back("mu_l" + std::to_string(i + 1) + "_o");
      }
      break;
    case ModelClass::PartiallySegmented:
      for (std::size_t i = 0; i < assets; ++i)
        names.push_back("mu_h" + std::to_string(i + 1) + "_n");
      names.push_back("mu_l_n");
      for (std::size_t i = 0; i < assets; ++i) {
        names.push_back("mu_h" + std::to_string(i + 1) + "_o");
        names.push_back("mu_l" + std::to_string(i + 1) + "_o");
      }
      break;
    case ModelClass::Heterogeneous:
      names = {"x", "y", "z", "u", "v", "w"};
      break;
  }
  return names;
}

std::vector<double> constraint_residuals(const NonSegmentedParams& p,
                                         const StateDistribution& mu) {
  const std::size_t k = p.assets();
  std::vector<double> res;
  res.reserve(1 + k);
  double sum = 0.0;
  for (double v : mu.values) sum += v;
  res.push_back(sum - 1.0);
  for (std::size_t i = 0; i < k; ++i)
    res.push_back(mu[nonseg::idx_ho(i)] + mu[nonseg::idx_lo(i)] - p.m[i]);
  return res;
}

std::vector<double> constraint_residuals(const PartiallySegmentedParams& p,
                                         const StateDistribution& mu) {
  const std::size_t k = p.assets();
  std::vector<double> res;
  res.reserve(1 + k);
  double sum = 0.0;
  for (double v : mu.values) sum += v;
  res.push_back(sum - 1.0);
  for (std::size_t i = 0; i < k; ++i)
    res.push_back(mu[partseg::idx_ho(k, i)] + mu[partseg::idx_lo(k, i)] - p.m[i]);
  return res;
}

std::vector<double> constraint_residuals(const HeterogeneousParams& p,
                                         const StateDistribution& mu) {
  double sum = 0.0;
  for (double v : mu.values) sum += v;
  const double supply = mu[het::idx_h1] + mu[het::idx_l1] +
                        2.0 * (mu[het::idx_h2] + mu[het::idx_l2]);
  return {sum - 1.0, supply - p.s};
}

namespace {

template <typename Params>
void check_impl(const Params& p, const StateDistribution& mu, std::size_t want_dim,
                ModelClass want_class, double tol) {
  if (mu.model_class != want_class)
    fail(ErrorCode::InvalidInitialState, "distribution tagged with the wrong model class");
  if (mu.size() != want_dim)
    fail(ErrorCode::InvalidInitialState,
         "distribution has " + std::to_string(mu.size()) + " components, expected " +
             std::to_string(want_dim));
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (!(mu[i] >= -tol) || !(mu[i] <= 1.0 + tol) || !std::isfinite(mu[i]))
      fail(ErrorCode::InvalidInitialState,
           "component " + std::to_string(i) + " outside [0,1]");
  for (double r : constraint_residuals(p, mu))
    if (std::abs(r) > tol)
      fail(ErrorCode::InvalidInitialState,
           "constraint violated by " + std::to_string(r));
}

}  // namespace

void check_distribution(const NonSegmentedParams& p, const StateDistribution& mu,
                        double tol) {
  check_impl(p, mu, nonseg::dim(p.assets()), ModelClass::NonSegmented, tol);
}

void check_distribution(const PartiallySegmentedParams& p, const StateDistribution& mu,
                        double tol) {
  check_impl(p, mu, partseg::dim(p.assets()), ModelClass::PartiallySegmented, tol);
}

void check_distribution(const HeterogeneousParams& p, const StateDistribution& mu,
                        double tol) {
  check_impl(p, mu, het::dim, ModelClass::Heterogeneous, tol);
}

StateDistribution default_initial_state(const NonSegmentedParams& p) {
  const std::size_t k = p.assets();
  StateDistribution mu{ModelClass::NonSegmented,
                       std::vector<double>(nonseg::dim(k), 0.0)};
  const double free_mass = 1.0 - p.total_mass();
  mu[nonseg::idx_hn] = free_mass / 2.0;
  mu[nonseg::idx_ln] = free_mass / 2.0;
  for (std::size_t i = 0; i < k; ++i) {
    mu[nonseg::idx_ho(i)] = p.m[i] / 2.0;
    mu[nonseg::idx_lo(i)] = p.m[i] / 2.0;
  }
  return mu;
}

StateDistribution default_initial_state(const PartiallySegmentedParams& p) {
  const std::size_t k = p.assets();
  StateDistribution mu{ModelClass::PartiallySegmented,
                       std::vector<double>(partseg::dim(k), 0.0)};
  const double free_mass = 1.0 - p.total_mass();
  for (std::size_t i = 0; i < k; ++i)
    mu[partseg::idx_hn(i)] = free_mass / (2.0 * static_cast<double>(k));
  mu[partseg::idx_ln(k)] = free_mass / 2.0;
  for (std::size_t i = 0; i < k; ++i) {
    mu[partseg::idx_ho(k, i)] = p.m[i] / 2.0;
    mu[partseg::idx_lo(k, i)] = p.m[i] / 2.0;
  }
  return mu;
}

StateDistribution default_initial_state(const HeterogeneousParams& p) {
  // Position-class masses q1, q2 chosen so q1 + 2 q2 = s with q0 >= 0 across
  // the whole supply range, then an even high/low split within each class.
  const double s = p.s;
  double q1, q2;
  if (s <= 1.0) {
    q1 = s / 2.0;
    q2 = s / 4.0;
  } else {
    q1 = (2.0 - s) / 2.0;
    q2 = (3.0 * s - 2.0) / 4.0;
  }
  const double q0 = 1.0 - q1 - q2;
  StateDistribution mu{ModelClass::Heterogeneous, std::vector<double>(het::dim, 0.0)};
  mu[het::idx_h0] = q0 / 2.0;
  mu[het::idx_h1] = q1 / 2.0;
  mu[het::idx_h2] = q2 / 2.0;
  mu[het::idx_l0] = q0 / 2.0;
  mu[het::idx_l1] = q1 / 2.0;
  mu[het::idx_l2] = q2 / 2.0;
  return mu;
}

}  // namespace otc
