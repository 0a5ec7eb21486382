#include "otc/poincare_miranda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "otc/error.hpp"

namespace otc {

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Extremes of f_i over the sampled face {x_i = value}.
struct FaceRange {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

FaceRange sample_face(const VectorFn& f, const Box& box, std::size_t coord,
                      double value, std::size_t grid) {
  const std::size_t n = box.dim();
  FaceRange range;
  std::vector<double> point(n);
  point[coord] = value;
  std::vector<std::size_t> idx(n, 0);  // idx[coord] stays 0 and is skipped

  while (true) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == coord) continue;
      const double t = static_cast<double>(idx[j]) / static_cast<double>(grid - 1);
      point[j] = box.lower[j] + t * (box.upper[j] - box.lower[j]);
    }
    const double fi = f(point)[coord];
    range.min = std::min(range.min, fi);
    range.max = std::max(range.max, fi);

    // Advance the mixed-radix counter over the n-1 free coordinates.
    std::size_t j = 0;
    while (j < n) {
      if (j == coord) {
        ++j;
        continue;
      }
      if (++idx[j] < grid) break;
      idx[j] = 0;
      ++j;
    }
    if (j == n) break;
  }
  return range;
}

Box child_box(const Box& parent, const std::vector<double>& mid, std::size_t mask) {
  const std::size_t n = parent.dim();
  Box child;
  child.lower.resize(n);
  child.upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool up = (mask >> i) & 1;
    child.lower[i] = up ? mid[i] : parent.lower[i];
    child.upper[i] = up ? parent.upper[i] : mid[i];
  }
  return child;
}

// Row-major dense solve with partial pivoting; false on near-singularity.
bool lin_solve(std::vector<double>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[perm[r] * n + col]) > std::abs(a[perm[pivot] * n + col]))
        pivot = r;
    std::swap(perm[col], perm[pivot]);
    const double diag = a[perm[col] * n + col];
    if (std::abs(diag) < 1e-14) return false;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[perm[r] * n + col] / diag;
      for (std::size_t c = col; c < n; ++c)
        a[perm[r] * n + c] -= factor * a[perm[col] * n + c];
      b[perm[r]] -= factor * b[perm[col]];
    }
  }
  std::vector<double> out(n);
  for (std::size_t row = n; row-- > 0;) {
    double acc = b[perm[row]];
    for (std::size_t c = row + 1; c < n; ++c) acc -= a[perm[row] * n + c] * out[c];
    out[row] = acc / a[perm[row] * n + row];
  }
  b = std::move(out);
  return true;
}

// Damped finite-difference Newton from the box centroid, kept inside a
// slightly inflated copy of the box. Used to steer uncertified steps toward
// the zero; purely heuristic, so failures just return the centroid.
std::vector<double> local_zero_estimate(const VectorFn& f, const Box& box) {
  const std::size_t n = box.dim();
  std::vector<double> point = box.centroid();
  std::vector<double> value = f(point);
  double res = inf_norm(value);

  for (int iter = 0; iter < 30 && res > 1e-14; ++iter) {
    std::vector<double> jac(n * n);
    bool jac_ok = true;
    for (std::size_t j = 0; j < n && jac_ok; ++j) {
      const double width = box.upper[j] - box.lower[j];
      const double h = std::max(1e-9, 1e-7 * width);
      std::vector<double> shifted = point;
      shifted[j] += h;
      const std::vector<double> fs = f(shifted);
      for (std::size_t i = 0; i < n; ++i) jac[i * n + j] = (fs[i] - value[i]) / h;
    }
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = -value[i];
    if (!jac_ok || !lin_solve(jac, step)) break;

    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half < 20; ++half) {
      std::vector<double> trial(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double margin = 0.1 * (box.upper[i] - box.lower[i]);
        trial[i] = std::clamp(point[i] + alpha * step[i], box.lower[i] - margin,
                              box.upper[i] + margin);
      }
      const std::vector<double> ft = f(trial);
      const double res_t = inf_norm(ft);
      if (res_t < res) {
        point = std::move(trial);
        value = ft;
        res = res_t;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  return point;
}

bool inside(const Box& box, const std::vector<double>& point) {
  for (std::size_t i = 0; i < box.dim(); ++i)
    if (point[i] < box.lower[i] || point[i] > box.upper[i]) return false;
  return true;
}

}  // namespace

FaceCertificate check_faces(const VectorFn& f, const Box& box,
                            std::size_t grid_points_per_axis) {
  validate(box);
  if (grid_points_per_axis < 2)
    fail(ErrorCode::InvalidArgument, "grid_points_per_axis must be >= 2");

  const std::size_t n = box.dim();
  FaceCertificate cert;
  cert.grid_points = grid_points_per_axis;
  cert.coords.resize(n);
  cert.certified = true;

  for (std::size_t i = 0; i < n; ++i) {
    const FaceRange lo = sample_face(f, box, i, box.lower[i], grid_points_per_axis);
    const FaceRange hi = sample_face(f, box, i, box.upper[i], grid_points_per_axis);
    FaceVerdict& v = cert.coords[i];
    v.lower_min = lo.min;
    v.lower_max = lo.max;
    v.upper_min = hi.min;
    v.upper_max = hi.max;
    const bool standard = lo.max <= kFaceSignTol && hi.min >= -kFaceSignTol;
    const bool reversed = lo.min >= -kFaceSignTol && hi.max <= kFaceSignTol;
    v.ok = standard || reversed;
    v.flipped = !standard && reversed;
    cert.certified = cert.certified && v.ok;
  }
  return cert;
}

std::size_t iterations_needed(double eps, std::size_t n) {
  if (!(eps > 0.0) || !(eps < 1.0))
    fail(ErrorCode::EpsOutOfRange, "eps must lie in (0, 1)");
  if (n < 1) fail(ErrorCode::InvalidArgument, "n must be >= 1");
  const double ratio = std::log(eps) / (static_cast<double>(n) * std::log(0.5));
  // Guard exact-integer ratios (powers of two) against log rounding noise.
  const double rounded = static_cast<double>(std::llround(ratio));
  if (std::abs(ratio - rounded) < 1e-9)
    return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(ratio));
}

RefineResult refine(const VectorFn& f, const Box& box0, double eps_volume,
                    const RefineOptions& options) {
  validate(box0);
  if (!(eps_volume > 0.0)) fail(ErrorCode::EpsOutOfRange, "eps_volume must be > 0");
  const std::size_t n = box0.dim();

  RefineResult result;
  result.box = box0;

  const FaceCertificate seed = check_faces(f, box0, options.grid_points_per_axis);
  result.seed_certified = seed.certified;
  if (!seed.certified && !options.residual_fallback)
    fail(ErrorCode::NotCertified, "seed box fails face certification");

  const double vol0 = box0.volume();
  result.fully_certified = seed.certified;
  if (eps_volume >= vol0) return result;

  const std::size_t total_steps = iterations_needed(eps_volume / vol0, n);
  const std::size_t n_children = static_cast<std::size_t>(1) << n;

  for (std::size_t step = 0; step < total_steps; ++step) {
    const std::vector<double> mid = result.box.centroid();

    std::size_t certified_count = 0;
    std::size_t chosen_certified = 0;
    double best_certified_residual = std::numeric_limits<double>::infinity();
    std::size_t chosen_any = 0;
    double best_any_residual = std::numeric_limits<double>::infinity();

    for (std::size_t mask = 0; mask < n_children; ++mask) {
      const Box child = child_box(result.box, mid, mask);
      const double res = inf_norm(f(child.centroid()));
      if (res < best_any_residual) {
        best_any_residual = res;
        chosen_any = mask;
      }
      if (check_faces(f, child, options.grid_points_per_axis).certified) {
        ++certified_count;
        if (res < best_certified_residual) {
          best_certified_residual = res;
          chosen_certified = mask;
        }
      }
    }

    const bool step_ok = certified_count == 1;
    std::size_t chosen;
    if (certified_count == 1) {
      chosen = chosen_certified;
    } else {
      if (certified_count == 0 && !options.residual_fallback)
        fail(ErrorCode::LostTrack,
             "no sub-box certifies at step " + std::to_string(step));
      // Ambiguous step: steer by a local zero estimate when one lands inside
      // the active box, otherwise fall back to the centroid residual rule.
      chosen = certified_count > 1 ? chosen_certified : chosen_any;
      const std::vector<double> estimate = local_zero_estimate(f, result.box);
      if (inside(result.box, estimate) &&
          inf_norm(f(estimate)) < best_any_residual) {
        std::size_t mask = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (estimate[i] > mid[i]) mask |= static_cast<std::size_t>(1) << i;
        chosen = mask;
      }
    }

    result.box = child_box(result.box, mid, chosen);
    result.step_certified.push_back(step_ok);
    result.fully_certified = result.fully_certified && step_ok;
    ++result.steps;
  }
  return result;
}

}  // namespace otc
