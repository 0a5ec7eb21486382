#include "otc/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "otc/error.hpp"
#include "otc/models.hpp"

namespace otc {

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::ScalarRoot: return "scalar-root";
    case SolveMethod::FixedPoint: return "fixed-point";
    case SolveMethod::PoincareMiranda: return "poincare-miranda";
    case SolveMethod::ClosedForm: return "closed-form";
  }
  return "?";
}

double steady_scalar_residual(const NonSegmentedParams& p, double x) {
  const std::size_t k = p.assets();
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double gi = p.gamma_i(i);
    acc += gi * p.gamma_di[i] * p.m[i] / (p.lambda[i] * x + gi);
    acc -= p.gamma_di[i] * p.m[i];
  }
  return acc + p.gamma_u * (1.0 - p.total_mass()) - p.gamma() * x;
}

namespace {

double steady_scalar_derivative(const NonSegmentedParams& p, double x) {
  double acc = -p.gamma();
  for (std::size_t i = 0; i < p.assets(); ++i) {
    const double gi = p.gamma_i(i);
    const double den = p.lambda[i] * x + gi;
    acc -= p.lambda[i] * gi * p.gamma_di[i] * p.m[i] / (den * den);
  }
  return acc;
}

StateDistribution reconstruct_nonsegmented(const NonSegmentedParams& p, double x) {
  const std::size_t k = p.assets();
  StateDistribution mu{ModelClass::NonSegmented,
                       std::vector<double>(nonseg::dim(k), 0.0)};
  mu[nonseg::idx_hn] = x;
  mu[nonseg::idx_ln] = 1.0 - x - p.total_mass();
  for (std::size_t i = 0; i < k; ++i) {
    const double lio = p.gamma_di[i] * p.m[i] / (p.lambda[i] * x + p.gamma_i(i));
    mu[nonseg::idx_lo(i)] = lio;
    mu[nonseg::idx_ho(i)] = p.m[i] - lio;
  }
  return mu;
}

}  // namespace

SteadySolution solve_nonsegmented(const NonSegmentedParams& p, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");
  const double hi0 = 1.0 - p.total_mass();

  double lo = 0.0, hi = hi0;
  // F(0) > 0 and F(1 - sum m) < 0, and F decreases, so bisection is safe.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      fail(ErrorCode::ToleranceUnreachable,
           "tol " + std::to_string(tol) + " is below the bracket's resolution");
    if (steady_scalar_residual(p, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }

  // Newton polish inside the certified bracket.
  double x = 0.5 * (lo + hi);
  double fx = steady_scalar_residual(p, x);
  for (int iter = 0; iter < 12 && fx != 0.0; ++iter) {
    const double dfx = steady_scalar_derivative(p, x);
    double next = x - fx / dfx;
    next = std::clamp(next, lo, hi);
    const double fnext = steady_scalar_residual(p, next);
    if (std::abs(fnext) >= std::abs(fx)) break;
    x = next;
    fx = fnext;
  }

  SteadySolution sol;
  sol.state = reconstruct_nonsegmented(p, x);
  sol.residual_inf_norm = inf_norm(rhs_nonsegmented(p, sol.state));
  sol.method = SolveMethod::ScalarRoot;
  return sol;
}

std::vector<double> fixed_point_map(const PartiallySegmentedParams& p,
                                    const std::vector<double>& x) {
  const std::size_t k = p.assets();
  if (x.size() != k)
    fail(ErrorCode::DimensionMismatch, "x has " + std::to_string(x.size()) +
                                           " entries, expected " + std::to_string(k));
  const double free_mass = 1.0 - p.total_mass();
  double total = 0.0;
  for (double xi : x) total += xi;

  std::vector<double> f(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double gi = p.gamma_i(i);
    const double gti = p.gamma_tilde_i(i);
    const double alpha = p.gamma_tilde_ui[i] / gti;
    const double others = total - x[i];
    f[i] = x[i] + alpha * others -
           gi * p.gamma_di[i] * p.m[i] / (gti * (p.lambda[i] * x[i] + gi)) +
           p.gamma_di[i] * p.m[i] / gti - alpha * free_mass;
  }
  return f;
}

namespace {

StateDistribution reconstruct_partially_segmented(const PartiallySegmentedParams& p,
                                                  const std::vector<double>& x) {
  const std::size_t k = p.assets();
  StateDistribution mu{ModelClass::PartiallySegmented,
                       std::vector<double>(partseg::dim(k), 0.0)};
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mu[partseg::idx_hn(i)] = x[i];
    total += x[i];
    const double lio = p.gamma_di[i] * p.m[i] / (p.lambda[i] * x[i] + p.gamma_i(i));
    mu[partseg::idx_lo(k, i)] = lio;
    mu[partseg::idx_ho(k, i)] = p.m[i] - lio;
  }
  mu[partseg::idx_ln(k)] = 1.0 - p.total_mass() - total;
  return mu;
}

// Value of x_i solving f_i = 0 with the other coordinates held fixed. The
// equation is quadratic in x_i; the admissible root is the one right of the
// pole of the rational term, computed in a cancellation-free form.
double explicit_update(const PartiallySegmentedParams& p, std::size_t i,
                       double sum_others) {
  const double gi = p.gamma_i(i);
  const double gti = p.gamma_tilde_i(i);
  const double alpha = p.gamma_tilde_ui[i] / gti;
  const double li = p.lambda[i];
  const double ci =
      alpha * sum_others + p.gamma_di[i] * p.m[i] / gti - alpha * (1.0 - p.total_mass());
  const double big_d = gi * p.gamma_di[i] * p.m[i] / gti;

  double root;
  if (li == 0.0) {
    root = (big_d - gi * ci) / gi;
  } else {
    const double b = gi + li * ci;
    const double disc = (gi - li * ci) * (gi - li * ci) + 4.0 * li * big_d;
    const double sq = std::sqrt(disc);
    root = (b >= 0.0) ? 2.0 * (big_d - gi * ci) / (b + sq) : (-b + sq) / (2.0 * li);
  }
  return std::clamp(root, 0.0, 1.0);
}

double rhs_equivalent_residual(const PartiallySegmentedParams& p,
                               const std::vector<double>& f) {
  // mu_dot(hi,n) = -gamma_tilde_i * f_i at the reconstructed state, and the
  // (l,n) component collects the sum of those terms.
  double worst = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < p.assets(); ++i) {
    const double r = p.gamma_tilde_i(i) * f[i];
    worst = std::max(worst, std::abs(r));
    sum += std::abs(r);
  }
  return std::max(worst, sum);
}

}  // namespace

std::vector<double> gauss_seidel_zero(const PartiallySegmentedParams& p,
                                      std::vector<double> start, double tol,
                                      std::size_t max_sweeps) {
  const std::size_t k = p.assets();
  if (start.size() != k)
    fail(ErrorCode::DimensionMismatch, "start has wrong dimension");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");

  std::vector<double> x = std::move(start);
  double total = 0.0;
  for (double xi : x) total += xi;

  std::size_t stalled = 0;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_rel_change = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double target = explicit_update(p, i, total - x[i]);
      const double next = x[i] + kGaussSeidelDamping * (target - x[i]);
      max_rel_change = std::max(max_rel_change,
                                std::abs(next - x[i]) / std::max(1.0, std::abs(x[i])));
      total += next - x[i];
      x[i] = next;
    }
    // Refresh the running total to stop rounding drift across sweeps.
    total = 0.0;
    for (double xi : x) total += xi;

    const double res = rhs_equivalent_residual(p, fixed_point_map(p, x));
    if (res <= tol) return x;
    if (max_rel_change < 1e-15) {
      if (++stalled >= 50)
        fail(ErrorCode::NoConvergence,
             "iteration stalled with residual " + std::to_string(res));
    } else {
      stalled = 0;
    }
  }
  fail(ErrorCode::NoConvergence, "sweep budget exhausted");
}

SteadySolution solve_partially_segmented(const PartiallySegmentedParams& p, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");
  const std::size_t k = p.assets();
  const double inner_tol = 0.5 * tol;

  std::vector<double> start(k, 0.5 * (1.0 - p.total_mass()));
  std::vector<double> x;
  bool fell_back = false;
  try {
    x = gauss_seidel_zero(p, start, inner_tol);
  } catch (const Error&) {
    fell_back = true;
  }

  if (fell_back) {
    // Certified subdivision fallback, then iterate again from the box centre.
    VectorFn f = [&p](const std::vector<double>& pt) { return fixed_point_map(p, pt); };
    RefineOptions options;
    const double eps_volume = std::pow(1e-3, static_cast<double>(k));
    const RefineResult localized = refine(f, Box::unit(k), eps_volume, options);
    x = gauss_seidel_zero(p, localized.box.centroid(), inner_tol);
  }

  SteadySolution sol;
  sol.state = reconstruct_partially_segmented(p, x);
  sol.residual_inf_norm = inf_norm(rhs_partially_segmented(p, sol.state));
  sol.method = SolveMethod::FixedPoint;
  if (sol.residual_inf_norm > tol)
    fail(ErrorCode::NoConvergence,
         "residual " + std::to_string(sol.residual_inf_norm) + " exceeds tol");
  return sol;
}

std::array<double, 6> reduced_residual_heterogeneous(const HeterogeneousParams& p,
                                                     const std::array<double, 6>& point) {
  const double x = point[0], y = point[1], z = point[2];
  const double u = point[3], v = point[4], w = point[5];
  const double L = p.lambda;
  return {
      L * (x * v + x * w) + x * p.c[0] - u * p.d[0],
      L * (x * v - y * w) - y * p.c[1] + v * p.d[1],
      L * (x * w + y * w) - z * p.c[2] + w * p.d[2],
      L * (y * v - x * w * p.a),
      x + y + z + u + v + w - 1.0,
      y + v + 2.0 * (z + w) - p.s,
  };
}

ConditionPReport check_condition_P(const HeterogeneousParams& p, const Box& box) {
  validate(box);
  if (box.dim() != 6)
    fail(ErrorCode::DimensionMismatch, "condition (P) needs a 6-dimensional box");

  const double x_hi = box.upper[0];
  const double y_lo = box.lower[1], y_hi = box.upper[1];
  const double z_lo = box.lower[2];
  const double u_hi = box.upper[3];
  const double v_lo = box.lower[4];
  const double w_lo = box.lower[5], w_hi = box.upper[5];

  ConditionPReport report;
  // Each inequality is affine in every variable, so its worst case over the
  // box sits at a corner and can be read off the bounds directly.
  report.conditions[0].margin = v_lo + w_lo + p.c[0] - u_hi * p.d[0];
  report.conditions[1].margin = v_lo - p.a * x_hi * w_hi;
  report.conditions[2].margin = -(x_hi - y_lo * w_lo - y_lo * p.c[1] + p.d[1]);
  report.conditions[3].margin = -(x_hi + y_hi - z_lo * p.c[2] + p.d[2]);

  report.holds = true;
  for (auto& item : report.conditions) {
    item.holds = item.margin >= 0.0;
    report.holds = report.holds && item.holds;
  }
  return report;
}

std::optional<double> closed_form_root(double s) {
  if (!(s >= 0.0) || !(s <= 2.0))
    fail(ErrorCode::SupplyOutOfRange, "s must lie in [0, 2]");
  const double root = 0.5 * (-s + std::sqrt(s * s - 2.0 * s + 3.0));
  if (root < 0.0) return std::nullopt;
  return root;
}

bool is_closed_form_family(const HeterogeneousParams& p) {
  return p.lambda == 1.0 && p.a == 1.0 && p.b == 0.0 && p.c[0] == 0.0 &&
         p.c[1] == 0.0 && p.c[2] == 1.0 && p.d[0] == 1.0 && p.d[1] == 0.0 &&
         p.d[2] == 0.0;
}

namespace {

struct Reduced4 {
  const HeterogeneousParams* p;

  // z and u eliminated through the two constraint rows.
  double z_of(const std::array<double, 4>& q) const {
    return 0.5 * (p->s - q[1] - q[2] - 2.0 * q[3]);
  }
  double u_of(const std::array<double, 4>& q, double z) const {
    return 1.0 - q[0] - q[1] - z - q[2] - q[3];
  }

  std::array<double, 4> residual(const std::array<double, 4>& q) const {
    const double x = q[0], y = q[1], v = q[2], w = q[3];
    const double z = z_of(q);
    const double u = u_of(q, z);
    const double L = p->lambda;
    return {
        L * (x * v + x * w) + x * p->c[0] - u * p->d[0],
        L * (x * v - y * w) - y * p->c[1] + v * p->d[1],
        L * (x * w + y * w) - z * p->c[2] + w * p->d[2],
        L * (y * v - x * w * p->a),
    };
  }

  // Analytic Jacobian; dz/dq = (0, -1/2, -1/2, -1), du/dq = (-1, -1/2, -1/2, 0).
  void jacobian(const std::array<double, 4>& q, double jac[4][4]) const {
    const double x = q[0], y = q[1], v = q[2], w = q[3];
    const double L = p->lambda;
    jac[0][0] = L * (v + w) + p->c[0] + p->d[0];
    jac[0][1] = 0.5 * p->d[0];
    jac[0][2] = L * x + 0.5 * p->d[0];
    jac[0][3] = L * x;
    jac[1][0] = L * v;
    jac[1][1] = -L * w - p->c[1];
    jac[1][2] = L * x + p->d[1];
    jac[1][3] = -L * y;
    jac[2][0] = L * w;
    jac[2][1] = L * w + 0.5 * p->c[2];
    jac[2][2] = 0.5 * p->c[2];
    jac[2][3] = L * (x + y) + p->c[2] + p->d[2];
    jac[3][0] = -L * p->a * w;
    jac[3][1] = L * v;
    jac[3][2] = L * y;
    jac[3][3] = -L * p->a * x;
  }
};

double inf_norm4(const std::array<double, 4>& v) {
  return std::max(std::max(std::abs(v[0]), std::abs(v[1])),
                  std::max(std::abs(v[2]), std::abs(v[3])));
}

// Gaussian elimination with partial pivoting; returns false on a (near)
// singular system.
bool solve4(double a[4][4], std::array<double, 4>& b) {
  int perm[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[perm[r]][col]) > std::abs(a[perm[pivot]][col])) pivot = r;
    std::swap(perm[col], perm[pivot]);
    const double diag = a[perm[col]][col];
    if (std::abs(diag) < 1e-14) return false;
    for (int r = col + 1; r < 4; ++r) {
      const double factor = a[perm[r]][col] / diag;
      for (int c = col; c < 4; ++c) a[perm[r]][c] -= factor * a[perm[col]][c];
      b[perm[r]] -= factor * b[perm[col]];
    }
  }
  std::array<double, 4> out{};
  for (int row = 3; row >= 0; --row) {
    double acc = b[perm[row]];
    for (int c = row + 1; c < 4; ++c) acc -= a[perm[row]][c] * out[c];
    out[row] = acc / a[perm[row]][row];
  }
  b = out;
  return true;
}

struct PolishResult {
  std::array<double, 4> point{};
  double residual = std::numeric_limits<double>::infinity();
};

PolishResult newton_polish(const Reduced4& sys, std::array<double, 4> q,
                           double target, std::size_t max_iter) {
  PolishResult best;
  std::array<double, 4> r = sys.residual(q);
  double res = inf_norm4(r);
  best.point = q;
  best.residual = res;

  for (std::size_t iter = 0; iter < max_iter && res > target; ++iter) {
    double jac[4][4];
    sys.jacobian(q, jac);
    std::array<double, 4> step = {-r[0], -r[1], -r[2], -r[3]};
    if (!solve4(jac, step)) break;

    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half < 24; ++half) {
      std::array<double, 4> trial;
      for (int i = 0; i < 4; ++i)
        trial[i] = std::clamp(q[i] + alpha * step[i], -0.25, 1.25);
      const std::array<double, 4> rt = sys.residual(trial);
      const double res_t = inf_norm4(rt);
      if (res_t < res) {
        q = trial;
        r = rt;
        res = res_t;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    if (res < best.residual) {
      best.point = q;
      best.residual = res;
    }
  }
  return best;
}

SteadySolution build_het_solution(const HeterogeneousParams& p,
                                  std::array<double, 6> point, SolveMethod method) {
  StateDistribution mu{ModelClass::Heterogeneous, std::vector<double>(het::dim, 0.0)};
  for (std::size_t i = 0; i < het::dim; ++i)
    mu[i] = point[i] < 0.0 ? 0.0 : point[i];  // clamp rounding-level negatives
  SteadySolution sol;
  sol.state = mu;
  sol.residual_inf_norm = inf_norm(rhs_heterogeneous(p, mu));
  sol.method = method;
  return sol;
}

constexpr double kFeasibilityTol = 1e-9;

bool feasible_point(const std::array<double, 6>& pt) {
  for (double v : pt)
    if (v < -kFeasibilityTol || v > 1.0 + kFeasibilityTol) return false;
  return true;
}

}  // namespace

HeterogeneousOutcome solve_heterogeneous(const HeterogeneousParams& p, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");
  HeterogeneousOutcome outcome;

  if (is_closed_form_family(p)) {
    const std::optional<double> root = closed_form_root(p.s);
    if (!root) {
      outcome.no_steady_state = NoSteadyStateInfo{
          "closed-form branch root is negative: 4x^2 + 4sx + 2s - 3 has no "
          "admissible root for this supply",
          0, std::numeric_limits<double>::infinity()};
      return outcome;
    }
    const double x = *root;
    const double v = (1.0 - 2.0 * x) / (2.0 + 4.0 * x);
    if (v >= -1e-12) {
      const double uz = 2.0 * x * v;
      outcome.solution =
          build_het_solution(p, {x, x, uz, uz, v, v}, SolveMethod::ClosedForm);
      return outcome;
    }
    // Root exists but the x = y branch is infeasible (v < 0); fall through to
    // the general search.
  }

  Reduced4 sys{&p};

  // Localize with centroid subdivision first, then polish; the subdivision
  // runs in residual-fallback mode because the reduced map need not satisfy
  // the face sign conditions on the whole unit box.
  VectorFn f4 = [&sys](const std::vector<double>& pt) {
    const std::array<double, 4> q{pt[0], pt[1], pt[2], pt[3]};
    const std::array<double, 4> r = sys.residual(q);
    return std::vector<double>(r.begin(), r.end());
  };
  const RefineResult localized = refine(f4, Box::unit(4), 1e-8, RefineOptions{});

  const double target = 0.5 * tol;
  double best_residual = std::numeric_limits<double>::infinity();
  std::size_t tried = 0;

  auto try_start = [&](const std::array<double, 4>& q0,
                       SolveMethod method) -> bool {
    ++tried;
    const PolishResult polished = newton_polish(sys, q0, target, 200);
    best_residual = std::min(best_residual, polished.residual);
    if (polished.residual > target) return false;
    const std::array<double, 4>& q = polished.point;
    const double z = sys.z_of(q);
    const double u = sys.u_of(q, z);
    const std::array<double, 6> pt{q[0], q[1], z, u, q[2], q[3]};
    if (!feasible_point(pt)) return false;
    SteadySolution sol = build_het_solution(p, pt, method);
    if (sol.residual_inf_norm > tol) return false;
    if (method == SolveMethod::PoincareMiranda)
      sol.certified_box_volume = localized.box.volume();
    outcome.solution = std::move(sol);
    return true;
  };

  const std::vector<double> centre = localized.box.centroid();
  if (try_start({centre[0], centre[1], centre[2], centre[3]},
                localized.fully_certified ? SolveMethod::PoincareMiranda
                                          : SolveMethod::FixedPoint))
    return outcome;

  // Deterministic multi-start sweep.
  std::mt19937_64 rng(0x0125ca7edbeef001ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int restart = 0; restart < 32; ++restart) {
    std::array<double, 4> q0{unit(rng), unit(rng), unit(rng), unit(rng)};
    if (try_start(q0, SolveMethod::FixedPoint)) return outcome;
  }

  outcome.no_steady_state = NoSteadyStateInfo{
      "no zero found: subdivision and all restarts stayed above tolerance or "
      "landed outside the feasible region",
      tried, best_residual};
  return outcome;
}

}  // namespace otc
