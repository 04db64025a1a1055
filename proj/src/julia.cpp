#include "torusdyn/julia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torusdyn/error.hpp"

namespace torusdyn {
namespace {

void check_raster(const Rect& r, int width, int height) {
  if (width < 1 || height < 1) fail(ErrorCode::InvalidArgument, "raster size must be positive");
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) fail(ErrorCode::InvalidArgument, "empty bounds rectangle");
}

// Uniform bucket grid over a point set for exact nearest-neighbour queries.
class PointGrid {
 public:
  explicit PointGrid(const std::vector<cplx>& pts) : pts_(pts) {
    min_x_ = max_x_ = pts[0].real();
    min_y_ = max_y_ = pts[0].imag();
    for (const auto& p : pts) {
      min_x_ = std::min(min_x_, p.real());
      max_x_ = std::max(max_x_, p.real());
      min_y_ = std::min(min_y_, p.imag());
      max_y_ = std::max(max_y_, p.imag());
    }
    const double extent = std::max({max_x_ - min_x_, max_y_ - min_y_, 1e-300});
    const double per_side = std::max(1.0, std::ceil(std::sqrt(static_cast<double>(pts.size()))));
    cell_ = extent / per_side;
    nx_ = static_cast<int>(std::floor((max_x_ - min_x_) / cell_)) + 1;
    ny_ = static_cast<int>(std::floor((max_y_ - min_y_) / cell_)) + 1;
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    for (const auto& p : pts) ++start_[index(cx(p.real()), cy(p.imag())) + 1];
    for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
    order_.resize(pts.size());
    auto fill = start_;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      order_[fill[index(cx(pts[k].real()), cy(pts[k].imag()))]++] = k;
    }
  }

  double nearest(cplx q) const {
    const int qx = cx(q.real()), qy = cy(q.imag());
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max(nx_, ny_);
    for (int r = 0; r <= max_ring; ++r) {
      for (int j = qy - r; j <= qy + r; ++j) {
        if (j < 0 || j >= ny_) continue;
        const bool edge_row = (j == qy - r || j == qy + r);
        for (int i = qx - r; i <= qx + r; i += (edge_row ? 1 : 2 * r)) {
          if (i >= 0 && i < nx_) scan(index(i, j), q, best);
          if (r == 0) break;
        }
      }
      if (best <= r * cell_) break;
    }
    return best;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>(std::floor((x - min_x_) / cell_)), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>(std::floor((y - min_y_) / cell_)), 0, ny_ - 1); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  void scan(std::size_t cell, cplx q, double& best) const {
    for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) best = std::min(best, std::abs(pts_[order_[k]] - q));
  }

  const std::vector<cplx>& pts_;
  double min_x_, max_x_, min_y_, max_y_, cell_;
  int nx_, ny_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

double directed(const std::vector<cplx>& from, const PointGrid& to) {
  double worst = 0.0;
  for (const auto& p : from) worst = std::max(worst, to.nearest(p));
  return worst;
}

}  // namespace

std::size_t FiberRaster::bounded_count() const {
  return static_cast<std::size_t>(std::count(escape.begin(), escape.end(), 0));
}

double FiberRaster::bounded_area() const {
  const double pixel = (bounds.x1 - bounds.x0) * (bounds.y1 - bounds.y0) / (static_cast<double>(width) * height);
  return pixel * static_cast<double>(bounded_count());
}

std::vector<cplx> FiberRaster::bounded_points() const {
  std::vector<cplx> out;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      if (at(i, j) == 0) out.push_back(pixel_center(bounds, width, height, i, j));
    }
  }
  return out;
}

FiberRaster fiber_filled_julia(const FiberedPolynomial& p, double theta, const Rect& bounds, int width,
                               int height, int budget) {
  check_raster(bounds, width, height);
  if (budget < 1) fail(ErrorCode::InvalidArgument, "iteration budget must be >= 1");
  FiberRaster out;
  out.theta = theta;
  out.bounds = bounds;
  out.width = width;
  out.height = height;
  out.budget = budget;
  out.escape_radius = escape_radius(p);
  out.escape.assign(static_cast<std::size_t>(width) * height, 0);

  const std::size_t terms = static_cast<std::size_t>(p.degree()) + 1;
  std::vector<cplx> coeffs(terms * static_cast<std::size_t>(budget));
  for (int n = 0; n < budget; ++n) {
    const auto c = p.coefficients_at(theta + n * p.alpha());
    std::copy(c.begin(), c.end(), coeffs.begin() + static_cast<std::ptrdiff_t>(n * terms));
  }
  const double r2 = out.escape_radius * out.escape_radius;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      cplx z = pixel_center(bounds, width, height, i, j);
      int escaped_at = 0;
      for (int n = 0; n < budget; ++n) {
        const cplx* c = coeffs.data() + static_cast<std::size_t>(n) * terms;
        cplx acc = c[terms - 1];
        for (std::size_t k = terms - 1; k-- > 0;) acc = acc * z + c[k];
        z = acc;
        if (std::norm(z) > r2 || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          escaped_at = n + 1;
          break;
        }
      }
      out.escape[static_cast<std::size_t>(j) * width + i] = escaped_at;
    }
  }
  return out;
}

double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptySet, "Hausdorff distance needs non-empty sets");
  const PointGrid ga(a), gb(b);
  return std::max(directed(a, gb), directed(b, ga));
}

double boundary_fraction(const FiberRaster& raster) {
  std::size_t bounded = 0, edge = 0;
  for (int j = 0; j < raster.height; ++j) {
    for (int i = 0; i < raster.width; ++i) {
      if (raster.at(i, j) != 0) continue;
      ++bounded;
      const bool touches = (i > 0 && raster.at(i - 1, j) != 0) || (i + 1 < raster.width && raster.at(i + 1, j) != 0) ||
                           (j > 0 && raster.at(i, j - 1) != 0) || (j + 1 < raster.height && raster.at(i, j + 1) != 0);
      if (touches) ++edge;
    }
  }
  return bounded == 0 ? 0.0 : static_cast<double>(edge) / static_cast<double>(bounded);
}

namespace {

ParamCell classify_with_tables(const Loop& lambda, const std::vector<const LambdaTable*>& tables,
                               const std::vector<cplx>& weights, const MembershipOptions& options) {
  ParamCell cell;
  const Loop fine = lambda.refined(4);
  if (fine.min_modulus() <= 1e-12) return cell;
  try {
    cell.winding = winding_number(lambda);
  } catch (const DomainError&) {
    return cell;  // near-vanishing loop that aliases: treat as invalid
  }
  cell.valid = true;
  if (cell.winding == 0) {
    const cplx chi = circle_mean(continuous_log(lambda));
    cell.lyapunov = chi.real();
    cell.kappa_hat = std::exp(chi);
  }
  const double radius = 1.0 + fine.sup_norm();
  const auto scan = scan_critical_orbit(tables, weights, radius, options.n_iter, options.converge_threshold);
  cell.escape_iteration = scan.escape_iteration;
  cell.member = cell.winding == 0 && *cell.lyapunov < 0.0 && scan.bounded && scan.converges;
  return cell;
}

}  // namespace

ParamCell classify_cell(const Loop& lambda, const RotationNumber& alpha, const MembershipOptions& options) {
  const LambdaTable table(lambda, alpha.alpha(), options.fiber_angles, options.n_iter);
  return classify_with_tables(lambda, {&table}, {cplx(1.0)}, options);
}

ParamRaster param_slice(const SliceSpec& spec, const RotationNumber& alpha, const MembershipOptions& options) {
  check_raster(spec.window, spec.width, spec.height);
  const std::size_t n = std::max({spec.base.size(), spec.dir1.size(), spec.dir2.size()});
  const Loop base = spec.base.resampled(n), d1 = spec.dir1.resampled(n), d2 = spec.dir2.resampled(n);
  const LambdaTable t0(base, alpha.alpha(), options.fiber_angles, options.n_iter);
  const LambdaTable t1(d1, alpha.alpha(), options.fiber_angles, options.n_iter);
  const LambdaTable t2(d2, alpha.alpha(), options.fiber_angles, options.n_iter);
  const std::vector<const LambdaTable*> tables{&t0, &t1, &t2};

  ParamRaster out;
  out.spec = spec;
  out.n_iter = options.n_iter;
  out.fiber_angles = options.fiber_angles;
  out.cells.resize(static_cast<std::size_t>(spec.width) * spec.height);
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) {
      const cplx st = pixel_center(spec.window, spec.width, spec.height, i, j);
      const double s = st.real(), t = st.imag();
      const Loop lambda = base + d1 * s + d2 * t;
      out.cells[static_cast<std::size_t>(j) * spec.width + i] =
          classify_with_tables(lambda, tables, {cplx(1.0), cplx(s), cplx(t)}, options);
    }
  }
  return out;
}

}  // namespace torusdyn
