#include "otc/random_draws.hpp"

namespace otc {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

std::vector<double> rate_vector(std::mt19937_64& rng, std::size_t k) {
  std::vector<double> v(k);
  for (double& x : v) x = uniform(rng, 0.1, 10.0);
  return v;
}

std::vector<double> mass_vector(std::mt19937_64& rng, std::size_t k) {
  const double total = uniform(rng, 0.05, 0.9);
  std::vector<double> weights(k);
  double sum = 0.0;
  for (double& w : weights) {
    w = uniform(rng, 0.1, 1.0);
    sum += w;
  }
  for (double& w : weights) w = total * w / sum;
  return weights;
}

std::size_t pick_k(std::mt19937_64& rng, std::size_t k_min, std::size_t k_max) {
  if (k_min >= k_max) return k_min;
  const std::size_t span = k_max - k_min + 1;
  return k_min + static_cast<std::size_t>(rng() % span);
}

}  // namespace

NonSegmentedParams draw_nonsegmented(std::mt19937_64& rng, std::size_t k_min,
                                     std::size_t k_max) {
  const std::size_t k = pick_k(rng, k_min, k_max);
  NonSegmentedParams p;
  p.lambda = rate_vector(rng, k);
  p.gamma_u = uniform(rng, 0.1, 10.0);
  p.gamma_d = uniform(rng, 0.1, 10.0);
  p.gamma_ui = rate_vector(rng, k);
  p.gamma_di = rate_vector(rng, k);
  p.m = mass_vector(rng, k);
  return p;
}

PartiallySegmentedParams draw_partially_segmented(std::mt19937_64& rng,
                                                  std::size_t k_min, std::size_t k_max) {
  const std::size_t k = pick_k(rng, k_min, k_max);
  PartiallySegmentedParams p;
  p.lambda = rate_vector(rng, k);
  p.gamma_ui = rate_vector(rng, k);
  p.gamma_di = rate_vector(rng, k);
  p.gamma_tilde_ui = rate_vector(rng, k);
  p.gamma_tilde_di = rate_vector(rng, k);
  p.m = mass_vector(rng, k);
  return p;
}

HeterogeneousParams draw_heterogeneous(std::mt19937_64& rng) {
  HeterogeneousParams p;
  p.lambda = uniform(rng, 0.1, 10.0);
  p.a = uniform(rng, 0.0, 1.0);
  p.b = 1.0 - p.a;
  for (int i = 0; i < 3; ++i) {
    p.c[i] = uniform(rng, 0.1, 10.0);
    p.d[i] = uniform(rng, 0.1, 10.0);
  }
  p.s = uniform(rng, 0.1, 1.9);
  return p;
}

StateDistribution draw_state(const NonSegmentedParams& p, std::mt19937_64& rng) {
  const std::size_t k = p.assets();
  StateDistribution mu{ModelClass::NonSegmented,
                       std::vector<double>(nonseg::dim(k), 0.0)};
  const double free_mass = 1.0 - p.total_mass();
  const double split = uniform(rng, 0.0, 1.0);
  mu[nonseg::idx_hn] = free_mass * split;
  mu[nonseg::idx_ln] = free_mass * (1.0 - split);
  for (std::size_t i = 0; i < k; ++i) {
    const double owner_split = uniform(rng, 0.0, 1.0);
    mu[nonseg::idx_ho(i)] = p.m[i] * owner_split;
    mu[nonseg::idx_lo(i)] = p.m[i] * (1.0 - owner_split);
  }
  return mu;
}

StateDistribution draw_state(const PartiallySegmentedParams& p, std::mt19937_64& rng) {
  const std::size_t k = p.assets();
  StateDistribution mu{ModelClass::PartiallySegmented,
                       std::vector<double>(partseg::dim(k), 0.0)};
  const double free_mass = 1.0 - p.total_mass();
  std::vector<double> weights(k + 1);
  double sum = 0.0;
  for (double& w : weights) {
    w = uniform(rng, 0.05, 1.0);
    sum += w;
  }
  for (std::size_t i = 0; i < k; ++i)
    mu[partseg::idx_hn(i)] = free_mass * weights[i] / sum;
  mu[partseg::idx_ln(k)] = free_mass * weights[k] / sum;
  for (std::size_t i = 0; i < k; ++i) {
    const double owner_split = uniform(rng, 0.0, 1.0);
    mu[partseg::idx_ho(k, i)] = p.m[i] * owner_split;
    mu[partseg::idx_lo(k, i)] = p.m[i] * (1.0 - owner_split);
  }
  return mu;
}

StateDistribution draw_state(const HeterogeneousParams& p, std::mt19937_64& rng) {
  // Position-class masses: q1 + 2 q2 = s with q0, q1, q2 >= 0 forces
  // q2 in [max(0, s-1), s/2].
  const double q2 = uniform(rng, std::max(0.0, p.s - 1.0), p.s / 2.0);
  const double q1 = p.s - 2.0 * q2;
  const double q0 = 1.0 - q1 - q2;
  StateDistribution mu{ModelClass::Heterogeneous, std::vector<double>(het::dim, 0.0)};
  const double s0 = uniform(rng, 0.0, 1.0);
  const double s1 = uniform(rng, 0.0, 1.0);
  const double s2 = uniform(rng, 0.0, 1.0);
  mu[het::idx_h0] = q0 * s0;
  mu[het::idx_l0] = q0 * (1.0 - s0);
  mu[het::idx_h1] = q1 * s1;
  mu[het::idx_l1] = q1 * (1.0 - s1);
  mu[het::idx_h2] = q2 * s2;
  mu[het::idx_l2] = q2 * (1.0 - s2);
  return mu;
}

}  // namespace otc
