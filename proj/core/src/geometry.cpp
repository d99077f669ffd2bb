#include "thermoform/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace thermoform {

namespace {

// Minimizes |sum_i a_i p_i| subject to sum_i a_i = 1 over the active set.
Vec affine_minimizer(const PointSet& pts, const std::vector<int>& active) {
  const int m = static_cast<int>(active.size());
  Mat kkt = Mat::Zero(m + 1, m + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) kkt(i, j) = pts[active[i]].dot(pts[active[j]]);
    kkt(i, m) = 1.0;
    kkt(m, i) = 1.0;
  }
  Vec rhs = Vec::Zero(m + 1);
  rhs(m) = 1.0;
  Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  Vec alpha = sol.head(m);
  const double s = alpha.sum();
  if (std::abs(s) > 0) alpha /= s;
  return alpha;
}

Vec combine(const PointSet& pts, const std::vector<int>& active, const Vec& w) {
  Vec x = Vec::Zero(pts.front().size());
  for (std::size_t i = 0; i < active.size(); ++i) x += w(i) * pts[active[i]];
  return x;
}

}  // namespace

Vec nearest_in_hull(const PointSet& points, const Vec& target) {
  if (points.empty()) throw std::invalid_argument("nearest_in_hull: empty point set");
  PointSet pts;
  pts.reserve(points.size());
  double scale = 0.0;
  for (const auto& p : points) {
    pts.push_back(p - target);
    scale = std::max(scale, pts.back().squaredNorm());
  }
  scale = std::max(scale, 1e-300);

  int start = 0;
  for (int i = 1; i < static_cast<int>(pts.size()); ++i)
    if (pts[i].squaredNorm() < pts[start].squaredNorm()) start = i;

  std::vector<int> active{start};
  Vec weights = Vec::Ones(1);
  Vec x = pts[start];
  const double tol = 1e-14;

  for (int major = 0; major < 1000; ++major) {
    int best = -1;
    double best_dot = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      const double d = pts[i].dot(x);
      if (d < best_dot) {
        best_dot = d;
        best = i;
      }
    }
    if (x.squaredNorm() - best_dot <= tol * scale) break;
    if (std::find(active.begin(), active.end(), best) != active.end()) break;
    active.push_back(best);
    weights.conservativeResize(weights.size() + 1);
    weights(weights.size() - 1) = 0.0;

    for (int minor = 0; minor < 1000; ++minor) {
      Vec alpha = affine_minimizer(pts, active);
      if ((alpha.array() > tol).all()) {
        weights = alpha;
        break;
      }
      double theta = 1.0;
      for (int i = 0; i < alpha.size(); ++i)
        if (alpha(i) <= tol) theta = std::min(theta, weights(i) / (weights(i) - alpha(i)));
      weights = weights + theta * (alpha - weights);
      std::vector<int> kept;
      std::vector<double> kept_w;
      for (int i = 0; i < weights.size(); ++i) {
        if (weights(i) > tol) {
          kept.push_back(active[i]);
          kept_w.push_back(weights(i));
        }
      }
      if (kept.empty()) {
        kept.push_back(active.back());
        kept_w.push_back(1.0);
      }
      active = kept;
      weights = Eigen::Map<Vec>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
      weights /= weights.sum();
    }
    x = combine(pts, active, weights);
  }
  return x + target;
}

double hull_distance(const PointSet& points, const Vec& target) {
  return (nearest_in_hull(points, target) - target).norm();
}

AffineHull affine_hull(const PointSet& points, double tol) {
  if (points.empty()) throw std::invalid_argument("affine_hull: empty point set");
  const Eigen::Index d = points.front().size();
  AffineHull hull;
  hull.offset = points.front();
  if (points.size() == 1) {
    hull.basis = Mat::Zero(d, 0);
    return hull;
  }
  Mat diffs(d, static_cast<Eigen::Index>(points.size() - 1));
  for (std::size_t i = 1; i < points.size(); ++i) diffs.col(static_cast<Eigen::Index>(i - 1)) = points[i] - points.front();
  Eigen::JacobiSVD<Mat> svd(diffs, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  int rank = 0;
  const double smax = s.size() ? s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(smax, 1.0)) ++rank;
  hull.basis = svd.matrixU().leftCols(rank);
  return hull;
}

namespace {

PointSet dedupe(const PointSet& points, double tol) {
  PointSet sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  PointSet out;
  for (const auto& p : sorted)
    if (out.empty() || (p - out.back()).lpNorm<Eigen::Infinity>() > tol) out.push_back(p);
  return out;
}

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

PointSet extreme_points(const PointSet& points, double tol) {
  PointSet pts = dedupe(points, tol);
  if (pts.size() <= 1) return pts;
  const AffineHull hull = affine_hull(pts);
  const int dim = hull.dim();
  if (dim == 0) return {pts.front()};

  if (dim == 1) {
    std::size_t lo = 0, hi = 0;
    std::vector<double> t(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) t[i] = hull.basis.col(0).dot(pts[i] - hull.offset);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (t[i] < t[lo]) lo = i;
      if (t[i] > t[hi]) hi = i;
    }
    // Orient along increasing first differing coordinate.
    const Vec dir = pts[hi] - pts[lo];
    for (Eigen::Index j = 0; j < dir.size(); ++j) {
      if (std::abs(dir(j)) > tol) {
        if (dir(j) < 0) std::swap(lo, hi);
        break;
      }
    }
    return {pts[lo], pts[hi]};
  }

  if (dim == 2) {
    std::vector<std::pair<Eigen::Vector2d, std::size_t>> planar;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec c = hull.basis.transpose() * (pts[i] - hull.offset);
      planar.push_back({Eigen::Vector2d(c(0), c(1)), i});
    }
    std::sort(planar.begin(), planar.end(), [](const auto& a, const auto& b) {
      return a.first.x() < b.first.x() || (a.first.x() == b.first.x() && a.first.y() < b.first.y());
    });
    const double eps = tol * tol;
    std::vector<std::pair<Eigen::Vector2d, std::size_t>> chain(2 * planar.size());
    std::size_t k = 0;
    for (const auto& p : planar) {
      while (k >= 2 && cross(chain[k - 2].first, chain[k - 1].first, p.first) <= eps) --k;
      chain[k++] = p;
    }
    for (std::size_t i = planar.size() - 1, lower = k + 1; i-- > 0;) {
      const auto& p = planar[i];
      while (k >= lower && cross(chain[k - 2].first, chain[k - 1].first, p.first) <= eps) --k;
      chain[k++] = p;
    }
    chain.resize(k - 1);
    // Planar orientation depends on the SVD basis; make the ambient order
    // counter-clockwise in the first two varying coordinates when possible.
    PointSet out;
    for (const auto& c : chain) out.push_back(pts[c.second]);
    if (hull.basis.rows() == 2 && out.size() >= 3) {
      double area = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const Vec& a = out[i];
        const Vec& b = out[(i + 1) % out.size()];
        area += a(0) * b(1) - a(1) * b(0);
      }
      if (area < 0) std::reverse(out.begin() + 1, out.end());
    }
    return out;
  }

  PointSet out;
  const double near = std::max(tol, 1e-9);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    PointSet others;
    bool duplicate = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      if ((pts[j] - pts[i]).norm() <= near) {
        if (j < i) duplicate = true;
        continue;
      }
      others.push_back(pts[j]);
    }
    if (duplicate) continue;
    if (others.empty() || hull_distance(others, pts[i]) > near) out.push_back(pts[i]);
  }
  return out;
}

Polygon::Polygon(PointSet ccw_vertices) : vertices_(std::move(ccw_vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("Polygon: need at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = vertices_[i];
    const Vec& b = vertices_[(i + 1) % n];
    Vec normal(2);
    normal << -(b(1) - a(1)), b(0) - a(0);
    normal.normalize();
    normals_.push_back(normal);
    offsets_.push_back(normal.dot(a));
  }
}

double Polygon::depth(const Vec& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normals_.size(); ++i) d = std::min(d, normals_[i].dot(p) - offsets_[i]);
  return d;
}

}  // namespace thermoform
