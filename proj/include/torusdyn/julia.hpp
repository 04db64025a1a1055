#pragma once

#include <optional>
#include <vector>

#include "torusdyn/multiplier_map.hpp"
#include "torusdyn/qpf.hpp"

namespace torusdyn {

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;
};

/// Pixel (i, j) with column i and row j; row 0 is the top edge (y1).
/// Samples are taken at pixel centers.
inline cplx pixel_center(const Rect& r, int width, int height, int i, int j) {
  return {r.x0 + (i + 0.5) * (r.x1 - r.x0) / width, r.y1 - (j + 0.5) * (r.y1 - r.y0) / height};
}

struct FiberRaster {
  double theta = 0.0;
  Rect bounds;
  int width = 0;
  int height = 0;
  int budget = 0;
  double escape_radius = 0.0;
  std::vector<int> escape;  // row-major; 0 = bounded within budget

  int at(int i, int j) const { return escape[static_cast<std::size_t>(j) * width + i]; }
  std::size_t bounded_count() const;
  double bounded_area() const;
  /// Pixel centers of the bounded pixels.
  std::vector<cplx> bounded_points() const;
};

/// Escape-time raster of the fiber at theta of the filled Julia set: the first
/// n in [1, budget] with |z_n| > R*, else 0.
FiberRaster fiber_filled_julia(const FiberedPolynomial& p, double theta, const Rect& bounds, int width,
                               int height, int budget);

/// Pompeiu-Hausdorff distance of finite point sets. Throws EmptySet.
double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Fraction of bounded pixels with an escaping 4-neighbour.
double boundary_fraction(const FiberRaster& raster);

/// lambda = base + s dir1 + t dir2 over (s, t) in `window`.
struct SliceSpec {
  Loop base = Loop::constant(0.0, 64);
  Loop dir1 = Loop::constant(1.0, 64);
  Loop dir2 = Loop::constant(cplx(0.0, 1.0), 64);
  Rect window;
  int width = 64;
  int height = 64;
};

struct ParamCell {
  bool valid = false;  // false when lambda vanishes somewhere
  int winding = 0;
  std::optional<double> lyapunov;
  std::optional<cplx> kappa_hat;
  bool member = false;
  int escape_iteration = 0;
};

struct ParamRaster {
  SliceSpec spec;
  int n_iter = 0;
  std::size_t fiber_angles = 0;
  std::vector<ParamCell> cells;  // row-major, row 0 = top (t = window.y1)

  const ParamCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * spec.width + i]; }
};

ParamRaster param_slice(const SliceSpec& spec, const RotationNumber& alpha,
                        const MembershipOptions& options = {});

/// Classification of a single parameter loop, as recorded in a slice cell.
ParamCell classify_cell(const Loop& lambda, const RotationNumber& alpha,
                        const MembershipOptions& options = {});

}  // namespace torusdyn
