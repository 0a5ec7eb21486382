#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace otc {

// Parameter sets for the three market classes. All rates are per unit time,
// asset masses and split probabilities are dimensionless proportions.

// Buyers do not target a specific asset: any high-type non-owner may buy any
// asset on offer. State space {(h,n), (l,n), (hi,o), (li,o)}.
struct NonSegmentedParams {
  std::vector<double> lambda;    // per-asset meeting rate
  double gamma_u = 0.0;          // non-owner low -> high
  double gamma_d = 0.0;          // non-owner high -> low
  std::vector<double> gamma_ui;  // owner of asset i, low -> high
  std::vector<double> gamma_di;  // owner of asset i, high -> low
  std::vector<double> m;         // per-asset mass, sum < 1

  std::size_t assets() const { return m.size(); }
  double gamma() const { return gamma_d + gamma_u; }
  double gamma_i(std::size_t i) const { return gamma_di[i] + gamma_ui[i]; }
  double total_mass() const;
};

// Each non-owning buyer targets one specific asset and trades only in it.
// State space {(hi,n), (l,n), (hi,o), (li,o)}.
struct PartiallySegmentedParams {
  std::vector<double> lambda;
  std::vector<double> gamma_ui;        // owner switching rates
  std::vector<double> gamma_di;
  std::vector<double> gamma_tilde_ui;  // non-owner switching rates, per target asset
  std::vector<double> gamma_tilde_di;

  std::vector<double> m;

  std::size_t assets() const { return m.size(); }
  double gamma_i(std::size_t i) const { return gamma_di[i] + gamma_ui[i]; }
  double gamma_tilde_i(std::size_t i) const {
    return gamma_tilde_di[i] + gamma_tilde_ui[i];
  }
  double total_mass() const;
};

// Investors hold portfolios worth 0, 1 or 2 ticks and trade partial
// positions pairwise. State space {(h,j), (l,j) | j in {0,1,2}}.
struct HeterogeneousParams {
  double lambda = 1.0;       // base meeting rate
  double a = 0.0;            // probability the (h,0)/(l,2) trade moves one tick
  double b = 0.0;            // probability it moves both ticks, a + b = 1
  std::array<double, 3> c{}; // high -> low switching rate per holding class
  std::array<double, 3> d{}; // low -> high switching rate per holding class
  double s = 0.0;            // total supply in tick units, 0 <= s <= 2
};

// Each validate() throws otc::Error on any violated invariant and returns
// its argument unchanged otherwise.
const NonSegmentedParams& validate(const NonSegmentedParams& p);
const PartiallySegmentedParams& validate(const PartiallySegmentedParams& p);
const HeterogeneousParams& validate(const HeterogeneousParams& p);

}  // namespace otc
