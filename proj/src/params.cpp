#include "otc/params.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "otc/error.hpp"

namespace otc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MassOverflow: return "MassOverflow";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::SplitNotUnit: return "SplitNotUnit";
    case ErrorCode::SupplyOutOfRange: return "SupplyOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidInitialState: return "InvalidInitialState";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::LostTrack: return "LostTrack";
    case ErrorCode::InfeasibleInitial: return "InfeasibleInitial";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "UnknownError";
}

double NonSegmentedParams::total_mass() const {
  return std::accumulate(m.begin(), m.end(), 0.0);
}

double PartiallySegmentedParams::total_mass() const {
  return std::accumulate(m.begin(), m.end(), 0.0);
}

namespace {

void check_vector_size(const std::vector<double>& v, std::size_t k, const char* name) {
  if (v.size() != k)
    fail(ErrorCode::DimensionMismatch,
         std::string(name) + " has " + std::to_string(v.size()) +
             " entries, expected " + std::to_string(k));
}

void check_positive_rates(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      fail(ErrorCode::NonPositiveRate,
           std::string(name) + "[" + std::to_string(i) + "] must be > 0");
}

void check_masses(const std::vector<double>& m) {
  if (m.empty()) fail(ErrorCode::InvalidArgument, "at least one asset required");
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(m[i] > 0.0) || !std::isfinite(m[i]))
      fail(ErrorCode::InvalidArgument, "m[" + std::to_string(i) + "] must be > 0");
    total += m[i];
  }
  if (!(total < 1.0))
    fail(ErrorCode::MassOverflow,
         "asset masses sum to " + std::to_string(total) + ", must be < 1");
}

}  // namespace

const NonSegmentedParams& validate(const NonSegmentedParams& p) {
  const std::size_t k = p.m.size();
  check_masses(p.m);
  check_vector_size(p.lambda, k, "lambda");
  check_vector_size(p.gamma_ui, k, "gamma_ui");
  check_vector_size(p.gamma_di, k, "gamma_di");
  check_positive_rates(p.lambda, "lambda");
  check_positive_rates(p.gamma_ui, "gamma_ui");
  check_positive_rates(p.gamma_di, "gamma_di");
  if (!(p.gamma_u > 0.0)) fail(ErrorCode::NonPositiveRate, "gamma_u must be > 0");
  if (!(p.gamma_d > 0.0)) fail(ErrorCode::NonPositiveRate, "gamma_d must be > 0");
  return p;
}

const PartiallySegmentedParams& validate(const PartiallySegmentedParams& p) {
  const std::size_t k = p.m.size();
  check_masses(p.m);
  check_vector_size(p.lambda, k, "lambda");
  check_vector_size(p.gamma_ui, k, "gamma_ui");
  check_vector_size(p.gamma_di, k, "gamma_di");
  check_vector_size(p.gamma_tilde_ui, k, "gamma_tilde_ui");
  check_vector_size(p.gamma_tilde_di, k, "gamma_tilde_di");
  check_positive_rates(p.lambda, "lambda");
  check_positive_rates(p.gamma_ui, "gamma_ui");
  check_positive_rates(p.gamma_di, "gamma_di");
  check_positive_rates(p.gamma_tilde_ui, "gamma_tilde_ui");
  check_positive_rates(p.gamma_tilde_di, "gamma_tilde_di");
  return p;
}

const HeterogeneousParams& validate(const HeterogeneousParams& p) {
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
    fail(ErrorCode::NonPositiveRate, "lambda must be > 0");
  if (!(p.a >= 0.0) || !(p.b >= 0.0))
    fail(ErrorCode::SplitNotUnit, "split probabilities a and b must be >= 0");
  if (std::abs(p.a + p.b - 1.0) > 1e-12)
    fail(ErrorCode::SplitNotUnit,
         "a + b = " + std::to_string(p.a + p.b) + ", must equal 1");
  double rate_sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (!(p.c[i] >= 0.0) || !std::isfinite(p.c[i]))
      fail(ErrorCode::NonPositiveRate, "c" + std::to_string(i) + " must be >= 0");
    if (!(p.d[i] >= 0.0) || !std::isfinite(p.d[i]))
      fail(ErrorCode::NonPositiveRate, "d" + std::to_string(i) + " must be >= 0");
    rate_sum += p.c[i] + p.d[i];
  }
  if (rate_sum == 0.0)
    fail(ErrorCode::NonPositiveRate,
         "all switching rates c0..c2, d0..d2 are zero; the chain degenerates");
  if (!(p.s >= 0.0) || !(p.s <= 2.0))
    fail(ErrorCode::SupplyOutOfRange, "s = " + std::to_string(p.s) + ", must lie in [0, 2]");
  return p;
}

}  // namespace otc
