#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thermoform/geometry.hpp"

namespace thermoform {

// Unvalidated model description, as read from a model file or a builtin.
struct RawModel {
  std::vector<std::string> alphabet;
  std::vector<std::vector<double>> adjacency;
  std::vector<std::vector<double>> potentials;  // one row per letter
};

struct RotationSet;
struct PotentialReduction;

namespace detail {
struct ModelCache;
}

// Subshift of finite type with a depth-1 locally constant vector potential.
// Row a of potentials() holds the value of every potential on the cylinder
// [a]. Instances are immutable; copies share lazily computed data.
class ShiftModel {
 public:
  int alphabet_size() const { return static_cast<int>(adjacency_.rows()); }
  int dim() const { return static_cast<int>(potentials_.cols()); }
  const Mat& adjacency() const { return adjacency_; }
  const Mat& potentials() const { return potentials_; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool is_full_shift() const { return full_shift_; }
  int period() const { return period_; }
  // log of the Perron eigenvalue of the adjacency matrix (nats).
  double topological_entropy() const { return topological_entropy_; }

  // Cached rotation_set(*this) and reduce_potentials(*this).
  const RotationSet& rotation() const;
  const PotentialReduction& reduction() const;

  RawModel to_raw() const;

  // Per-model memo for derived data owned by other modules. make() runs at
  // most once per key, also under concurrent access.
  std::shared_ptr<const void> memo(const std::string& key,
                                   const std::function<std::shared_ptr<const void>()>& make) const;

 private:
  friend ShiftModel validate_model(const RawModel& raw);
  ShiftModel() = default;

  Mat adjacency_;
  Mat potentials_;
  std::vector<std::string> labels_;
  bool full_shift_ = false;
  int period_ = 1;
  double topological_entropy_ = 0.0;
  std::shared_ptr<detail::ModelCache> cache_;
};

// Throws ReducibleAdjacency, BadDimensions, NonBinaryAdjacency,
// NonFinitePotential or ZeroEntropy.
ShiftModel validate_model(const RawModel& raw);

// Builtin identifiers: curie_weiss, asymmetric_cw, potts:<n>, freezing.
RawModel builtin_raw_model(std::string_view id);
ShiftModel builtin_model(std::string_view id);

struct PerronOptions {
  double tolerance = 1e-14;
  int max_iterations = 100000;
};

// Linear thermodynamic data at the dual parameter y.
struct PerronData {
  Vec y;
  double eigenvalue = 0.0;  // exp(pressure); may overflow to inf for huge |y|
  double pressure = 0.0;    // log of the Perron eigenvalue (nats)
  Vec stationary;           // p with p Q = p
  Mat transitions;          // row-stochastic Q supported on the adjacency
  Vec z;                    // potential averages of the Markov measure
  double entropy = 0.0;     // Kolmogorov-Sinai entropy of the Markov measure
};

// Transfer matrix M[a][b] = A[a][b] exp(y . Phi[a]); Perron eigenvalue and
// eigenvectors by normalized power iteration. Throws PerronFailure.
PerronData linear_pressure(const ShiftModel& model, const Vec& y, const PerronOptions& options = {});

// Pressure, its gradient and the entropy of the Markov measure; same solver
// as linear_pressure without materializing the transition matrix.
struct PressureGradient {
  double pressure = 0.0;
  Vec z;
  double entropy = 0.0;
};
PressureGradient pressure_gradient(const ShiftModel& model, const Vec& y, const PerronOptions& options = {});

struct RotationSetOptions {
  int max_letters = 12;
  long max_cycles = 2'000'000;
  bool allow_fallback = true;
};

struct RotationSet {
  PointSet extreme_points;
  int effective_dim = 0;
  std::optional<AffineHull> affine_hull;  // set when effective_dim < ambient dim
  std::vector<std::pair<double, double>> bounding_box;
  bool approximate = false;

  int ambient_dim() const { return static_cast<int>(bounding_box.size()); }
  double distance(const Vec& z) const;
  bool contains(const Vec& z, double slack = 1e-9) const { return distance(z) <= slack; }
  Vec centroid() const;
  double diameter() const;
};

// Extreme points of the convex hull of simple-cycle means. Throws
// CycleBudgetExceeded when enumeration is impossible and fallback is off.
RotationSet rotation_set(const ShiftModel& model, const RotationSetOptions& options = {});

// Affine map R^{d'} -> R^d, z = linear * z' + offset.
struct AffineMap {
  Mat linear;
  Vec offset;
  Vec apply(const Vec& reduced) const { return linear * reduced + offset; }
};

// Maximal affinely independent subfamily of the potentials, chosen by
// pivoting on the spread over the rotation set (ties go to the lower index),
// and the map that recovers every potential average from the kept ones on
// the rotation set.
struct PotentialReduction {
  ShiftModel model;
  AffineMap lift;
  std::vector<int> kept;
  bool identity = true;

  int reduced_dim() const { return static_cast<int>(kept.size()); }
  // Kept coordinates of z.
  Vec project(const Vec& z) const;
  // Dual parameter on the original model with the same transfer matrix.
  Vec embed_dual(const Vec& reduced_y) const;
};

PotentialReduction reduce_potentials(const ShiftModel& model);

}  // namespace thermoform
