#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "otc/box.hpp"

namespace otc {

using VectorFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Sign tolerance on face checks, absorbing rounding at exact-zero faces.
inline constexpr double kFaceSignTol = 1e-12;
inline constexpr std::size_t kDefaultFaceGrid = 9;

// Sampled sign verdict for one coordinate pair of opposite faces. The
// standard orientation asks f_i <= 0 on the lower face and f_i >= 0 on the
// upper face; `flipped` records that the reversed orientation passed instead.
struct FaceVerdict {
  bool ok = false;
  bool flipped = false;
  double lower_min = 0.0, lower_max = 0.0;
  double upper_min = 0.0, upper_max = 0.0;
};

// This is a heuristic certificate: faces are sampled on a finite grid, not
// verified exhaustively.
struct FaceCertificate {
  bool certified = false;
  std::size_t grid_points = 0;
  std::vector<FaceVerdict> coords;
};

// Samples each face pair on a uniform grid of grid_points_per_axis points per
// axis and records per-coordinate sign verdicts with orientation.
FaceCertificate check_faces(const VectorFn& f, const Box& box,
                            std::size_t grid_points_per_axis = kDefaultFaceGrid);

struct RefineOptions {
  std::size_t grid_points_per_axis = kDefaultFaceGrid;
  // When true (default), a step where zero or several sub-boxes certify
  // proceeds with the sub-box of smallest centroid residual and is marked
  // uncertified. When false, an uncertified seed box raises NotCertified and
  // a step with no certified sub-box raises LostTrack.
  bool residual_fallback = true;
};

struct RefineResult {
  Box box;
  std::size_t steps = 0;
  bool seed_certified = false;
  bool fully_certified = false;       // seed and every step certified
  std::vector<bool> step_certified;   // one flag per subdivision step
};

// Centroid subdivision: bisects every coordinate of the active box through
// its centroid into 2^n sub-boxes, keeps the one whose faces certify, and
// repeats until volume(box) < eps_volume. Runs exactly
// iterations_needed(eps_volume / volume(box0), n) steps; eps_volume >=
// volume(box0) returns box0 untouched.
RefineResult refine(const VectorFn& f, const Box& box0, double eps_volume,
                    const RefineOptions& options = {});

// ceil(ln(eps) / (n ln 1/2)), the number of centroid subdivisions needed to
// push a unit box below volume eps. Throws EpsOutOfRange unless 0 < eps < 1.
std::size_t iterations_needed(double eps, std::size_t n);

}  // namespace otc
