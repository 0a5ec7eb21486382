#include "otc/models.hpp"

#include <string>

#include "otc/error.hpp"

namespace otc {

namespace {

void require_dim(std::size_t got, std::size_t want) {
  if (got != want)
    fail(ErrorCode::DimensionMismatch,
         "state has " + std::to_string(got) + " components, expected " +
             std::to_string(want));
}

// Core derivative evaluations on raw vectors; the public overloads wrap them
// with dimension checks. Trade flows are written as lambda*buyer*seller so
// the K = 1 partially segmented system reproduces the non-segmented one
// bit for bit on the identified state space.

void rhs_nonseg_core(const NonSegmentedParams& p, const std::vector<double>& mu,
                     std::vector<double>& out) {
  const std::size_t k = p.assets();
  out.assign(nonseg::dim(k), 0.0);
  const double hn = mu[nonseg::idx_hn];
  const double ln = mu[nonseg::idx_ln];

  double trade_total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double ho = mu[nonseg::idx_ho(i)];
    const double lo = mu[nonseg::idx_lo(i)];
    const double trade = p.lambda[i] * hn * lo;  // (h,n) buys asset i from (li,o)
    trade_total += trade;
    out[nonseg::idx_ho(i)] = trade + p.gamma_ui[i] * lo - p.gamma_di[i] * ho;
    out[nonseg::idx_lo(i)] = -trade - p.gamma_ui[i] * lo + p.gamma_di[i] * ho;
  }
  out[nonseg::idx_hn] = -trade_total + p.gamma_u * ln - p.gamma_d * hn;
  out[nonseg::idx_ln] = trade_total - p.gamma_u * ln + p.gamma_d * hn;
}

void rhs_partseg_core(const PartiallySegmentedParams& p, const std::vector<double>& mu,
                      std::vector<double>& out) {
  const std::size_t k = p.assets();
  out.assign(partseg::dim(k), 0.0);
  const double ln = mu[partseg::idx_ln(k)];

  double ln_dot = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double hin = mu[partseg::idx_hn(i)];
    const double ho = mu[partseg::idx_ho(k, i)];
    const double lo = mu[partseg::idx_lo(k, i)];
    const double trade = p.lambda[i] * hin * lo;  // (hi,n) buys asset i from (li,o)
    out[partseg::idx_hn(i)] =
        -trade + p.gamma_tilde_ui[i] * ln - p.gamma_tilde_di[i] * hin;
    ln_dot += trade - p.gamma_tilde_ui[i] * ln + p.gamma_tilde_di[i] * hin;
    out[partseg::idx_ho(k, i)] = trade + p.gamma_ui[i] * lo - p.gamma_di[i] * ho;
    out[partseg::idx_lo(k, i)] = -trade - p.gamma_ui[i] * lo + p.gamma_di[i] * ho;
  }
  out[partseg::idx_ln(k)] = ln_dot;
}

void rhs_het_core(const HeterogeneousParams& p, const std::vector<double>& mu,
                  std::vector<double>& out) {
  out.assign(het::dim, 0.0);
  const double x = mu[het::idx_h0], y = mu[het::idx_h1], z = mu[het::idx_h2];
  const double u = mu[het::idx_l0], v = mu[het::idx_l1], w = mu[het::idx_l2];
  const double L = p.lambda;

  // Pairwise trade flows. The (h,0)/(l,2) meeting splits into a one-tick
  // branch (probability a) and a two-tick branch (probability b).
  const double xv = L * x * v;       // (h,0)+(l,1) -> (h,1)+(l,0)
  const double xw = L * x * w;       // (h,0)+(l,2), split a/b below
  const double yv = L * y * v;       // (h,1)+(l,1) -> (h,2)+(l,0)
  const double yw = L * y * w;       // (h,1)+(l,2) -> (h,2)+(l,1)
  const double xwa = xw * p.a;       // -> (h,1)+(l,1)
  const double xwb = xw * p.b;       // -> (h,2)+(l,0)

  out[het::idx_h0] = -xv - xw - x * p.c[0] + u * p.d[0];
  out[het::idx_h1] = xv + xwa - yv - yw - y * p.c[1] + v * p.d[1];
  out[het::idx_h2] = xwb + yv + yw - z * p.c[2] + w * p.d[2];
  out[het::idx_l0] = xv + xwb + yv + x * p.c[0] - u * p.d[0];
  out[het::idx_l1] = xwa - xv + yw - yv + y * p.c[1] - v * p.d[1];
  out[het::idx_l2] = -xw - yw + z * p.c[2] - w * p.d[2];
}

}  // namespace

std::vector<double> rhs_nonsegmented(const NonSegmentedParams& p,
                                     const StateDistribution& mu) {
  require_dim(mu.size(), nonseg::dim(p.assets()));
  std::vector<double> out;
  rhs_nonseg_core(p, mu.values, out);
  return out;
}

std::vector<double> rhs_partially_segmented(const PartiallySegmentedParams& p,
                                            const StateDistribution& mu) {
  require_dim(mu.size(), partseg::dim(p.assets()));
  std::vector<double> out;
  rhs_partseg_core(p, mu.values, out);
  return out;
}

std::vector<double> rhs_heterogeneous(const HeterogeneousParams& p,
                                      const StateDistribution& mu) {
  require_dim(mu.size(), het::dim);
  std::vector<double> out;
  rhs_het_core(p, mu.values, out);
  return out;
}

RhsFn make_rhs(const NonSegmentedParams& p) {
  return [p](const std::vector<double>& mu, std::vector<double>& out) {
    rhs_nonseg_core(p, mu, out);
  };
}

RhsFn make_rhs(const PartiallySegmentedParams& p) {
  return [p](const std::vector<double>& mu, std::vector<double>& out) {
    rhs_partseg_core(p, mu, out);
  };
}

RhsFn make_rhs(const HeterogeneousParams& p) {
  return [p](const std::vector<double>& mu, std::vector<double>& out) {
    rhs_het_core(p, mu, out);
  };
}

double TransitionKernel::rate(std::size_t from, std::size_t to) const {
  for (const Entry& e : entries)
    if (e.from == from && e.to == to) return e.rate;
  return 0.0;
}

TransitionKernel kernel(const NonSegmentedParams& p, const StateDistribution& mu) {
  require_dim(mu.size(), nonseg::dim(p.assets()));
  const std::size_t k = p.assets();
  TransitionKernel kn;
  kn.n_states = nonseg::dim(k);
  kn.entries.push_back({nonseg::idx_ln, nonseg::idx_hn, p.gamma_u});
  kn.entries.push_back({nonseg::idx_hn, nonseg::idx_ln, p.gamma_d});
  for (std::size_t i = 0; i < k; ++i) {
    kn.entries.push_back(
        {nonseg::idx_hn, nonseg::idx_ho(i), p.lambda[i] * mu[nonseg::idx_lo(i)]});
    kn.entries.push_back(
        {nonseg::idx_lo(i), nonseg::idx_ln, p.lambda[i] * mu[nonseg::idx_hn]});
    kn.entries.push_back({nonseg::idx_lo(i), nonseg::idx_ho(i), p.gamma_ui[i]});
    kn.entries.push_back({nonseg::idx_ho(i), nonseg::idx_lo(i), p.gamma_di[i]});
  }
  return kn;
}

TransitionKernel kernel(const PartiallySegmentedParams& p, const StateDistribution& mu) {
  require_dim(mu.size(), partseg::dim(p.assets()));
  const std::size_t k = p.assets();
  TransitionKernel kn;
  kn.n_states = partseg::dim(k);
  for (std::size_t i = 0; i < k; ++i) {
    kn.entries.push_back({partseg::idx_hn(i), partseg::idx_ho(k, i),
                          p.lambda[i] * mu[partseg::idx_lo(k, i)]});
    kn.entries.push_back({partseg::idx_lo(k, i), partseg::idx_ln(k),
                          p.lambda[i] * mu[partseg::idx_hn(i)]});
    kn.entries.push_back(
        {partseg::idx_lo(k, i), partseg::idx_ho(k, i), p.gamma_ui[i]});
    kn.entries.push_back(
        {partseg::idx_ho(k, i), partseg::idx_lo(k, i), p.gamma_di[i]});
    kn.entries.push_back(
        {partseg::idx_ln(k), partseg::idx_hn(i), p.gamma_tilde_ui[i]});
    kn.entries.push_back(
        {partseg::idx_hn(i), partseg::idx_ln(k), p.gamma_tilde_di[i]});
  }
  return kn;
}

TransitionKernel kernel(const HeterogeneousParams& p, const StateDistribution& mu) {
  require_dim(mu.size(), het::dim);
  const double L = p.lambda;
  const double x = mu[het::idx_h0], y = mu[het::idx_h1];
  const double v = mu[het::idx_l1], w = mu[het::idx_l2];
  TransitionKernel kn;
  kn.n_states = het::dim;
  kn.entries.push_back({het::idx_h0, het::idx_h1, L * (v + p.a * w)});
  kn.entries.push_back({het::idx_h0, het::idx_h2, L * p.b * w});
  kn.entries.push_back({het::idx_h1, het::idx_h2, L * (v + w)});
  kn.entries.push_back({het::idx_l1, het::idx_l0, L * (x + y)});
  kn.entries.push_back({het::idx_l2, het::idx_l1, L * (y + p.a * x)});
  kn.entries.push_back({het::idx_l2, het::idx_l0, L * p.b * x});
  const std::size_t high[3] = {het::idx_h0, het::idx_h1, het::idx_h2};
  const std::size_t low[3] = {het::idx_l0, het::idx_l1, het::idx_l2};
  for (int i = 0; i < 3; ++i) {
    kn.entries.push_back({high[i], low[i], p.c[i]});
    kn.entries.push_back({low[i], high[i], p.d[i]});
  }
  return kn;
}

std::vector<double> kernel_drift(const TransitionKernel& k, const StateDistribution& mu) {
  require_dim(mu.size(), k.n_states);
  std::vector<double> drift(k.n_states, 0.0);
  for (const TransitionKernel::Entry& e : k.entries) {
    const double flow = mu[e.from] * e.rate;
    drift[e.from] -= flow;
    drift[e.to] += flow;
  }
  return drift;
}

}  // namespace otc
