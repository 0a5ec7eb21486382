#include "otc/ode.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "otc/error.hpp"

namespace otc {

namespace {

constexpr double kRangeTol = 1e-9;
constexpr double kNegativeClamp = -1e-9;

struct Rk4Workspace {
  std::vector<double> k1, k2, k3, k4, tmp;

  explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

void rk4_step(const RhsFn& rhs, std::vector<double>& y, double h, Rk4Workspace& ws,
              const std::vector<double>* k1_precomputed = nullptr) {
  const std::size_t n = y.size();
  if (k1_precomputed)
    ws.k1 = *k1_precomputed;
  else
    rhs(y, ws.k1);
  for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * h * ws.k1[i];
  rhs(ws.tmp, ws.k2);
  for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * h * ws.k2[i];
  rhs(ws.tmp, ws.k3);
  for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + h * ws.k3[i];
  rhs(ws.tmp, ws.k4);
  for (std::size_t i = 0; i < n; ++i)
    y[i] += (h / 6.0) * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
}

// Samples clamp components in (-1e-9, 0) to zero; the integrator state
// itself is never clamped.
StateDistribution make_sample(ModelClass mc, const std::vector<double>& y) {
  StateDistribution s{mc, y};
  for (double& v : s.values) {
    if (v < 0.0) {
      if (v < kNegativeClamp)
        fail(ErrorCode::StepTooLarge,
             "sampled component " + std::to_string(v) +
                 " left [0,1]; reduce the step size");
      v = 0.0;
    } else if (v > 1.0 + kRangeTol) {
      fail(ErrorCode::StepTooLarge,
           "sampled component " + std::to_string(v) +
               " left [0,1]; reduce the step size");
    }
  }
  return s;
}

void check_initial(const StateDistribution& state0) {
  double sum = 0.0;
  for (double v : state0.values) {
    if (!std::isfinite(v) || v < -1e-12 || v > 1.0 + 1e-12)
      fail(ErrorCode::InvalidInitialState, "initial component outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(ErrorCode::InvalidInitialState,
         "initial components sum to " + std::to_string(sum));
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Trajectory integrate(const RhsFn& rhs, const StateDistribution& state0, double t_end,
                     double step, double sample_every) {
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "step must be > 0");
  if (!(t_end >= 0.0)) fail(ErrorCode::InvalidArgument, "t_end must be >= 0");
  if (!(sample_every > 0.0)) fail(ErrorCode::InvalidArgument, "sample_every must be > 0");
  check_initial(state0);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(make_sample(state0.model_class, state0.values));
  if (t_end == 0.0) return traj;

  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
  const std::size_t steps_per_sample = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(sample_every / step)));

  std::vector<double> y = state0.values;
  Rk4Workspace ws(y.size());
  for (std::size_t i = 1; i <= n_steps; ++i) {
    // Land the final step exactly on t_end.
    const double t_prev = static_cast<double>(i - 1) * step;
    const double h = (i == n_steps) ? t_end - t_prev : step;
    rk4_step(rhs, y, h, ws);
    if (i == n_steps) {
      traj.times.push_back(t_end);
      traj.states.push_back(make_sample(state0.model_class, y));
    } else if (i % steps_per_sample == 0) {
      traj.times.push_back(static_cast<double>(i) * step);
      traj.states.push_back(make_sample(state0.model_class, y));
    }
  }
  return traj;
}

RelaxationReport relax_to_steady(const RhsFn& rhs, const StateDistribution& state0,
                                 double tol, double t_max, double step) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "step must be > 0");
  check_initial(state0);

  std::vector<double> y = state0.values;
  Rk4Workspace ws(y.size());
  std::vector<double> residual(y.size());

  RelaxationReport report;
  std::size_t i = 0;
  double t = 0.0;
  while (true) {
    rhs(y, residual);
    const double res = inf_norm(residual);
    if (res <= tol) {
      report.converged = true;
      report.residual_inf_norm = res;
      break;
    }
    if (t >= t_max) {
      report.converged = false;
      report.residual_inf_norm = res;
      break;
    }
    const double h = std::min(step, t_max - t);
    rk4_step(rhs, y, h, ws, &residual);
    ++i;
    t = (h == step) ? static_cast<double>(i) * step : t_max;
    if (i % 1024 == 0) {
      for (double v : y)
        if (!std::isfinite(v) || v < kNegativeClamp || v > 1.0 + kRangeTol)
          fail(ErrorCode::StepTooLarge, "state left [0,1]; reduce the step size");
    }
  }
  report.final_state = make_sample(state0.model_class, y);
  report.elapsed_model_time = t;
  return report;
}

}  // namespace otc
