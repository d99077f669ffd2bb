#pragma once

#include <Eigen/Dense>
#include <vector>

namespace thermoform {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using PointSet = std::vector<Vec>;

// Point of conv(points) nearest to target (Wolfe's minimum-norm-point
// algorithm applied to the translated set). points must be nonempty.
Vec nearest_in_hull(const PointSet& points, const Vec& target);

// Euclidean distance from target to conv(points).
double hull_distance(const PointSet& points, const Vec& target);

// Affine hull of a point set: offset + span(basis columns).
struct AffineHull {
  Vec offset;
  Mat basis;  // ambient_dim x dim, orthonormal columns
  int dim() const { return static_cast<int>(basis.cols()); }
};

// tol is relative to the largest singular value of the centered points.
AffineHull affine_hull(const PointSet& points, double tol = 1e-10);

// Extreme points of conv(points) after deduplication. The order is
// deterministic: ascending along the hull line for dim 1, counter-clockwise
// from the lowest-leftmost vertex for dim 2, input order otherwise.
PointSet extreme_points(const PointSet& points, double tol = 1e-12);

// Convex polygon in the plane given by counter-clockwise vertices.
class Polygon {
 public:
  explicit Polygon(PointSet ccw_vertices);

  const PointSet& vertices() const { return vertices_; }
  // Signed distance to the boundary, positive inside.
  double depth(const Vec& p) const;

 private:
  PointSet vertices_;
  std::vector<Vec> normals_;  // inward unit normals, one per edge
  std::vector<double> offsets_;
};

}  // namespace thermoform
