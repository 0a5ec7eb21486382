#pragma once

#include <cmath>
#include <vector>

#include "otc/params.hpp"
#include "otc/state.hpp"

namespace otc_test {

// K=1 benchmark: lambda=1, every switching rate 1, m=0.2. Its steady
// mu(h,n) is the positive root of 2x^2 + 3.4x - 1.6 = 0.
inline otc::NonSegmentedParams benchmark_nonseg() {
  otc::NonSegmentedParams p;
  p.lambda = {1.0};
  p.gamma_u = 1.0;
  p.gamma_d = 1.0;
  p.gamma_ui = {1.0};
  p.gamma_di = {1.0};
  p.m = {0.2};
  return p;
}

// Frozen from an independent bisection oracle on 0.4/(x+2) + 0.6 - 2x.
inline constexpr double kBenchmarkRoot = 0.38389626792530662;
inline constexpr double kBenchmarkLio = 0.083896267925306592;
inline constexpr double kBenchmarkHio = 0.11610373207469342;
inline constexpr double kBenchmarkLn = 0.41610373207469342;

// One-way switching family: c=(0,0,1), d=(1,0,0), a=1, b=0, lambda=1.
inline otc::HeterogeneousParams one_way_family(double s) {
  otc::HeterogeneousParams p;
  p.lambda = 1.0;
  p.a = 1.0;
  p.b = 0.0;
  p.c = {0.0, 0.0, 1.0};
  p.d = {1.0, 0.0, 0.0};
  p.s = s;
  return p;
}

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline otc::StateDistribution nonseg_state(std::vector<double> values) {
  return {otc::ModelClass::NonSegmented, std::move(values)};
}

inline otc::StateDistribution partseg_state(std::vector<double> values) {
  return {otc::ModelClass::PartiallySegmented, std::move(values)};
}

inline otc::StateDistribution het_state(std::vector<double> values) {
  return {otc::ModelClass::Heterogeneous, std::move(values)};
}

}  // namespace otc_test
