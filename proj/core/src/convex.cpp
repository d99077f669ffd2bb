#include "thermoform/convex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "thermoform/error.hpp"
#include "thermoform/parallel.hpp"

namespace thermoform {

std::string_view to_string(EntropyStatus status) noexcept {
  switch (status) {
    case EntropyStatus::interior: return "interior";
    case EntropyStatus::near_boundary: return "near_boundary";
    case EntropyStatus::outside: return "outside";
  }
  return "unknown";
}

namespace {

struct Point {
  Vec y;
  double f = 0.0;  // P(y) - y.z
  Vec grad;        // z(y) - z
  double residual = 0.0;
};

Point evaluate(const ShiftModel& model, const Vec& y, const Vec& z) {
  const PressureGradient pg = pressure_gradient(model, y);
  Point p;
  p.y = y;
  p.f = pg.entropy + y.dot(pg.z - z);
  p.grad = pg.z - z;
  p.residual = p.grad.cwiseAbs().maxCoeff();
  return p;
}

Mat hessian(const ShiftModel& model, const Vec& y, double step) {
  const Eigen::Index d = y.size();
  Mat h(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec up = y, down = y;
    up(j) += step;
    down(j) -= step;
    h.col(j) = (pressure_gradient(model, up).z - pressure_gradient(model, down).z) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

Vec newton_direction(const Mat& h, const Vec& grad) {
  const Eigen::LDLT<Mat> ldlt(h);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const Vec dir = ldlt.solve(-grad);
    if (dir.allFinite() && dir.dot(grad) < 0.0) return dir;
  }
  // Regularized fallback for numerically singular Hessians.
  const double shift = std::max(1e-12, 1e-8 * h.diagonal().cwiseAbs().maxCoeff());
  const Mat reg = h + shift * Mat::Identity(h.rows(), h.cols());
  const Vec dir = reg.ldlt().solve(-grad);
  if (dir.allFinite() && dir.dot(grad) < 0.0) return dir;
  return -grad;
}

Vec clip_to_ball(Vec y, double radius) {
  const double n = y.norm();
  if (n > radius) y *= radius / n;
  return y;
}

EntropyEvaluation solve_dual(const ShiftModel& model, const Vec& z, const EntropyOptions& options, const Vec& start) {
  Point cur = evaluate(model, clip_to_ball(start, options.y_max), z);
  int clipped_streak = 0;
  int it = 0;
  bool converged = false;
  bool boundary = false;
  for (; it < options.max_iterations; ++it) {
    const Mat h = hessian(model, cur.y, options.fd_step);
    const Vec dir = newton_direction(h, cur.grad);

    bool accepted = false;
    bool clipped = false;
    Point next;
    double t = 1.0;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Vec raw = cur.y + t * dir;
      const Vec trial = clip_to_ball(raw, options.y_max);
      next = evaluate(model, trial, z);
      const double slack = 4e-16 * (std::abs(cur.f) + std::abs(cur.y.dot(z)) + 1.0);
      if (next.f <= cur.f + slack || next.residual < cur.residual) {
        accepted = true;
        clipped = trial.size() > 0 && (raw - trial).norm() > 0.0;
        break;
      }
    }
    if (!accepted) break;

    const double step = (next.y - cur.y).norm();
    const bool improved = next.residual < cur.residual;
    cur = std::move(next);

    clipped_streak = clipped ? clipped_streak + 1 : 0;
    if (clipped_streak >= 3 || (clipped && step < 1e-12)) {
      boundary = true;
      break;
    }
    if (cur.residual < options.tolerance) {
      // Keep polishing for relative accuracy of y when z(y) is flat.
      if (step <= 1e-10 * (1.0 + cur.y.norm()) || !improved) {
        converged = true;
        break;
      }
    }
  }

  EntropyEvaluation out;
  out.z = z;
  out.h = cur.f;
  out.dual_y = cur.y;
  out.grad_h = -cur.y;
  out.residual = cur.residual;
  out.iterations = it;
  const bool on_sphere = cur.y.norm() >= options.y_max * (1.0 - 1e-9);
  if (converged || cur.residual < options.tolerance) {
    out.status = on_sphere ? EntropyStatus::near_boundary : EntropyStatus::interior;
  } else if (boundary || on_sphere) {
    out.status = EntropyStatus::near_boundary;
  } else if (cur.residual < 1e3 * options.tolerance) {
    // Stalled at roundoff level.
    out.status = EntropyStatus::interior;
  } else {
    throw Error(ErrorKind::NoConvergence,
                "dual Newton iteration stalled with residual " + std::to_string(cur.residual));
  }
  return out;
}


// A far-off warm start can strand Newton on the clipping ball; retry cold.
EntropyEvaluation solve_from(const ShiftModel& model, const Vec& z, const EntropyOptions& options, const Vec& start) {
  if (start.isZero()) return solve_dual(model, z, options, start);
  try {
    return solve_dual(model, z, options, start);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoConvergence) throw;
    return solve_dual(model, z, options, Vec::Zero(start.size()));
  }
}

// Exact vertices and faces have no finite dual, but saturated roundoff can
// still let Newton report convergence there.
bool on_relative_boundary(const ShiftModel& work, const Vec& z) {
  const RotationSet& hull = work.rotation();
  if (z.size() == 1) {
    double lo = hull.extreme_points.front()(0), hi = lo;
    for (const auto& p : hull.extreme_points) lo = std::min(lo, p(0)), hi = std::max(hi, p(0));
    return z(0) <= lo || z(0) >= hi;
  }
  const Vec out = z - hull.centroid();
  if (out.norm() == 0.0) return false;
  return hull.distance(z + 1e-9 * out) > 1e-13 * hull.diameter();
}

EntropyEvaluation classify(const ShiftModel& work, const Vec& z, EntropyEvaluation e) {
  if (e.status == EntropyStatus::interior && on_relative_boundary(work, z)) e.status = EntropyStatus::near_boundary;
  return e;
}

}  // namespace

EntropyEvaluation entropy_at(const ShiftModel& model, const Vec& z, const EntropyOptions& options,
                             const Vec* warm_start) {
  if (z.size() != model.dim())
    throw Error(ErrorKind::BadDimensions, "query point has dimension " + std::to_string(z.size()) + ", model has " +
                                              std::to_string(model.dim()) + " potentials");
  if (!z.allFinite()) throw Error(ErrorKind::InvalidInput, "query point is not finite");
  const int d = model.dim();

  if (model.rotation().distance(z) > options.hull_slack) {
    EntropyEvaluation out;
    out.z = z;
    out.dual_y = Vec::Constant(d, std::numeric_limits<double>::quiet_NaN());
    out.grad_h = out.dual_y;
    out.status = EntropyStatus::outside;
    return out;
  }

  const PotentialReduction& red = model.reduction();
  if (red.identity) {
    const Vec start = warm_start ? *warm_start : Vec::Zero(d);
    return classify(model, z, solve_from(model, z, options, start));
  }
  const Vec zr = red.project(z);
  Vec start = Vec::Zero(red.reduced_dim());
  if (warm_start) start = red.project(*warm_start);
  EntropyEvaluation inner = classify(red.model, zr, solve_from(red.model, zr, options, start));
  inner.z = z;
  inner.dual_y = red.embed_dual(inner.dual_y);
  inner.grad_h = -inner.dual_y;
  return inner;
}

DiagramTable diagram(const ShiftModel& model, const DiagramGrid& grid, const EntropyOptions& options) {
  if (grid.points_per_axis < 2) throw Error(ErrorKind::InvalidInput, "diagram grid needs at least 2 points per axis");
  const PotentialReduction& red = model.reduction();
  const int d = red.reduced_dim();
  if (d > 2)
    throw Error(ErrorKind::DimensionTooHigh,
                "diagram needs at most 2 independent potentials, model has " + std::to_string(d));
  const ShiftModel& work = red.model;
  const RotationSet& hull = work.rotation();
  const double margin = grid.edge_margin * hull.diameter();

  std::vector<std::pair<double, double>> ranges = grid.ranges;
  if (ranges.empty()) {
    for (const auto& [lo, hi] : hull.bounding_box) ranges.emplace_back(lo + margin, hi - margin);
  }
  if (static_cast<int>(ranges.size()) != d)
    throw Error(ErrorKind::BadDimensions, "diagram ranges must match the reduced dimension");

  auto depth = [&](const Vec& z) {
    if (d == 1) {
      const double lo = hull.extreme_points.front()(0), hi = hull.extreme_points.back()(0);
      return std::min(z(0) - std::min(lo, hi), std::max(lo, hi) - z(0));
    }
    return Polygon(hull.extreme_points).depth(z);
  };

  // Default ranges start exactly at the margin; allow for the roundoff.
  const double keep = margin * (1.0 - 1e-9);
  const int n = grid.points_per_axis;
  auto coord = [&](int axis, int i) {
    const auto [lo, hi] = ranges[axis];
    return i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  };
  std::vector<Vec> points;
  if (d == 1) {
    for (int i = 0; i < n; ++i) {
      Vec z(1);
      z << coord(0, i);
      if (depth(z) >= keep) points.push_back(z);
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec z(2);
        z << coord(0, i), coord(1, j);
        if (depth(z) >= keep) points.push_back(z);
      }
  }

  DiagramTable table;
  table.grid = grid;
  table.reduced = !red.identity;
  table.kept = red.kept;
  table.rows.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const EntropyEvaluation e = entropy_at(work, points[i], options);
    table.rows[i] = {e.z, e.h, e.grad_h, e.status};
  });

  std::string spec = "regular " + std::to_string(n) + " per axis on ";
  char buf[96];
  for (int a = 0; a < d; ++a) {
    std::snprintf(buf, sizeof buf, "%s[%.17g, %.17g]", a ? " x " : "", ranges[a].first, ranges[a].second);
    spec += buf;
  }
  std::snprintf(buf, sizeof buf, ", edge margin %.17g", margin);
  table.grid_spec = spec + buf;
  return table;
}

}  // namespace thermoform
