#include "thermoform/shift_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <queue>
#include <string>

#include "thermoform/error.hpp"

namespace thermoform {

namespace detail {
struct ModelCache {
  std::once_flag rotation_once;
  std::optional<RotationSet> rotation;
  std::once_flag reduction_once;
  std::optional<PotentialReduction> reduction;

  struct Slot {
    std::once_flag once;
    std::shared_ptr<const void> value;
  };
  std::mutex memo_mutex;
  std::map<std::string, std::shared_ptr<Slot>> memo;
};
}  // namespace detail

namespace {

constexpr double kMinLogWeight = -700.0;

std::vector<bool> reachable(const Mat& adjacency, int from, bool transpose) {
  const int k = static_cast<int>(adjacency.rows());
  std::vector<bool> seen(k, false);
  std::queue<int> frontier;
  frontier.push(from);
  seen[from] = true;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < k; ++v) {
      const double edge = transpose ? adjacency(v, u) : adjacency(u, v);
      if (edge != 0.0 && !seen[v]) {
        seen[v] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

int graph_period(const Mat& adjacency) {
  const int k = static_cast<int>(adjacency.rows());
  std::vector<int> level(k, -1);
  std::queue<int> frontier;
  level[0] = 0;
  frontier.push(0);
  int g = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < k; ++v) {
      if (adjacency(u, v) == 0.0) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g == 0 ? 1 : g;
}

// Dominant eigenpair of a nonnegative irreducible matrix. The shift makes the
// dominant eigenvalue strictly largest in modulus for periodic graphs.
struct Eigenpair {
  double value = 0.0;
  Vec vector;
};

Eigenpair power_iteration(const Mat& m, double shift, const PerronOptions& options) {
  const Eigen::Index k = m.rows();
  Vec x = Vec::Constant(k, 1.0 / static_cast<double>(k));
  Vec next(k);
  double lambda = -1.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    next.noalias() = m * x;
    if (shift != 0.0) next += shift * x;
    const double total = next.sum();
    if (!(total > 0.0) || !std::isfinite(total))
      throw Error(ErrorKind::PerronFailure, "power iteration produced a degenerate vector");
    next /= total;
    const double estimate = total - shift;
    bool vector_done = true;
    for (Eigen::Index a = 0; a < k; ++a) {
      if (std::abs(next(a) - x(a)) > 1e-12 * next(a) && next(a) > 0.0) {
        vector_done = false;
        break;
      }
    }
    const bool value_done = std::abs(estimate - lambda) <= options.tolerance * std::max(1.0, estimate);
    x.swap(next);
    lambda = estimate;
    if (value_done && vector_done && it > 0) return {lambda, x};
  }
  throw Error(ErrorKind::PerronFailure,
              "power iteration did not converge within " + std::to_string(options.max_iterations) + " iterations");
}

struct TransferMatrix {
  Mat m;
  double log_scale = 0.0;
  double shift = 0.0;
};

TransferMatrix transfer_matrix(const ShiftModel& model, const Vec& y) {
  const int k = model.alphabet_size();
  if (y.size() != model.dim())
    throw Error(ErrorKind::BadDimensions, "dual parameter has dimension " + std::to_string(y.size()) +
                                              ", model has " + std::to_string(model.dim()) + " potentials");
  if (!y.allFinite()) throw Error(ErrorKind::InvalidInput, "dual parameter is not finite");
  Vec s = model.potentials() * y;
  TransferMatrix t;
  t.log_scale = s.maxCoeff();
  t.m.resize(k, k);
  for (int a = 0; a < k; ++a) {
    const double w = std::exp(std::max(s(a) - t.log_scale, kMinLogWeight));
    t.m.row(a) = model.adjacency().row(a) * w;
  }
  if (model.period() > 1) t.shift = t.m.rowwise().sum().maxCoeff();
  return t;
}

}  // namespace

const RotationSet& ShiftModel::rotation() const {
  std::call_once(cache_->rotation_once, [this] { cache_->rotation = rotation_set(*this); });
  return *cache_->rotation;
}

const PotentialReduction& ShiftModel::reduction() const {
  std::call_once(cache_->reduction_once, [this] { cache_->reduction = reduce_potentials(*this); });
  return *cache_->reduction;
}

std::shared_ptr<const void> ShiftModel::memo(const std::string& key,
                                             const std::function<std::shared_ptr<const void>()>& make) const {
  std::shared_ptr<detail::ModelCache::Slot> slot;
  {
    std::lock_guard lock(cache_->memo_mutex);
    auto& entry = cache_->memo[key];
    if (!entry) entry = std::make_shared<detail::ModelCache::Slot>();
    slot = entry;
  }
  std::call_once(slot->once, [&] { slot->value = make(); });
  return slot->value;
}

RawModel ShiftModel::to_raw() const {
  RawModel raw;
  raw.alphabet = labels_;
  const int k = alphabet_size();
  raw.adjacency.assign(k, std::vector<double>(k));
  raw.potentials.assign(k, std::vector<double>(dim()));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) raw.adjacency[a][b] = adjacency_(a, b);
    for (int j = 0; j < dim(); ++j) raw.potentials[a][j] = potentials_(a, j);
  }
  return raw;
}

ShiftModel validate_model(const RawModel& raw) {
  const std::size_t k = raw.adjacency.size();
  if (k < 2) throw Error(ErrorKind::BadDimensions, "alphabet must have at least 2 letters");
  if (raw.potentials.size() != k)
    throw Error(ErrorKind::BadDimensions, "potentials must have one row per letter");
  if (!raw.alphabet.empty() && raw.alphabet.size() != k)
    throw Error(ErrorKind::BadDimensions, "alphabet size does not match adjacency");
  const std::size_t d = raw.potentials.front().size();
  if (d < 1) throw Error(ErrorKind::BadDimensions, "at least one potential is required");

  ShiftModel model;
  model.adjacency_.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  model.potentials_.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  bool full = true;
  for (std::size_t a = 0; a < k; ++a) {
    if (raw.adjacency[a].size() != k) throw Error(ErrorKind::BadDimensions, "adjacency must be square");
    if (raw.potentials[a].size() != d) throw Error(ErrorKind::BadDimensions, "potential rows differ in length");
    for (std::size_t b = 0; b < k; ++b) {
      const double e = raw.adjacency[a][b];
      if (e != 0.0 && e != 1.0) throw Error(ErrorKind::NonBinaryAdjacency, "adjacency entries must be 0 or 1");
      model.adjacency_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = e;
      full = full && e == 1.0;
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double v = raw.potentials[a][j];
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinitePotential, "potential values must be finite");
      model.potentials_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) = v;
    }
  }

  const auto forward = reachable(model.adjacency_, 0, false);
  const auto backward = reachable(model.adjacency_, 0, true);
  for (std::size_t a = 0; a < k; ++a)
    if (!forward[a] || !backward[a])
      throw Error(ErrorKind::ReducibleAdjacency, "adjacency graph is not strongly connected");

  model.full_shift_ = full;
  model.period_ = graph_period(model.adjacency_);
  const double shift = model.period_ > 1 ? model.adjacency_.rowwise().sum().maxCoeff() : 0.0;
  const double lambda = power_iteration(model.adjacency_, shift, {}).value;
  if (!(lambda > 1.0 + 1e-12))
    throw Error(ErrorKind::ZeroEntropy, "adjacency graph carries a single cycle (zero topological entropy)");
  model.topological_entropy_ = std::log(lambda);

  if (raw.alphabet.empty()) {
    for (std::size_t a = 0; a < k; ++a) model.labels_.push_back("s" + std::to_string(a + 1));
  } else {
    model.labels_ = raw.alphabet;
  }
  model.cache_ = std::make_shared<detail::ModelCache>();
  return model;
}

RawModel builtin_raw_model(std::string_view id) {
  RawModel raw;
  if (id == "curie_weiss") {
    raw.alphabet = {"a", "b"};
    raw.adjacency = {{1, 1}, {1, 1}};
    raw.potentials = {{-1.0}, {1.0}};
  } else if (id == "asymmetric_cw") {
    raw.alphabet = {"a", "b", "c"};
    raw.adjacency = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    raw.potentials = {{-2.0}, {-2.0}, {3.0}};
  } else if (id == "freezing") {
    raw.alphabet = {"a", "b"};
    raw.adjacency = {{1, 1}, {1, 1}};
    raw.potentials = {{0.0}, {-1.0}};
  } else if (id.substr(0, 6) == "potts:") {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(std::string(id.substr(6)), &used);
      if (used != id.size() - 6) n = 0;
    } catch (...) {
      n = 0;
    }
    if (n < 2) throw Error(ErrorKind::InvalidInput, "potts builtin needs an integer letter count >= 2");
    for (int a = 0; a < n; ++a) {
      raw.alphabet.push_back("t" + std::to_string(a + 1));
      raw.adjacency.push_back(std::vector<double>(n, 1.0));
      std::vector<double> row(n, 0.0);
      row[a] = 1.0;
      raw.potentials.push_back(row);
    }
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown builtin model '" + std::string(id) + "'");
  }
  return raw;
}

ShiftModel builtin_model(std::string_view id) { return validate_model(builtin_raw_model(id)); }

namespace {

struct Eigenvectors {
  double pressure = 0.0;
  double scaled_lambda = 0.0;
  Vec right;
  Vec left;
  TransferMatrix transfer;
};

Eigenvectors solve_perron(const ShiftModel& model, const Vec& y, const PerronOptions& options, bool need_left) {
  Eigenvectors e;
  e.transfer = transfer_matrix(model, y);
  const Eigenpair right = power_iteration(e.transfer.m, e.transfer.shift, options);
  e.scaled_lambda = right.value;
  e.right = right.vector;
  e.pressure = std::log(right.value) + e.transfer.log_scale;
  if (need_left) {
    if (model.is_full_shift()) {
      // M = w 1^T: the left Perron vector is constant.
      e.left = Vec::Ones(model.alphabet_size());
    } else {
      const Mat mt = e.transfer.m.transpose();
      e.left = power_iteration(mt, e.transfer.shift, options).vector;
    }
  }
  return e;
}

Vec stationary_from(const Eigenvectors& e) {
  Vec p = e.left.cwiseProduct(e.right);
  const double total = p.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::PerronFailure, "degenerate Perron eigenvectors");
  return p / total;
}

// Row a of Q is M[a][.] r / (lambda r[a]); rows are normalized directly so
// the entropy stays accurate when r[a] underflows.
double markov_entropy(const Mat& m, const Vec& right, const Vec& p) {
  const Eigen::Index k = m.rows();
  double entropy = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) {
    if (p(a) <= 0.0) continue;
    double total = 0.0;
    for (Eigen::Index b = 0; b < k; ++b) total += m(a, b) * right(b);
    if (!(total > 0.0)) continue;
    double row = 0.0;
    for (Eigen::Index b = 0; b < k; ++b) {
      const double q = m(a, b) * right(b) / total;
      if (q > 0.0) row -= q * std::log(q);
    }
    entropy += p(a) * row;
  }
  return std::max(entropy, 0.0);
}

}  // namespace

PressureGradient pressure_gradient(const ShiftModel& model, const Vec& y, const PerronOptions& options) {
  const Eigenvectors e = solve_perron(model, y, options, true);
  const Vec p = stationary_from(e);
  return {e.pressure, model.potentials().transpose() * p, markov_entropy(e.transfer.m, e.right, p)};
}

PerronData linear_pressure(const ShiftModel& model, const Vec& y, const PerronOptions& options) {
  const Eigenvectors e = solve_perron(model, y, options, true);
  const int k = model.alphabet_size();
  PerronData out;
  out.y = y;
  out.pressure = e.pressure;
  out.eigenvalue = std::exp(e.pressure);
  out.stationary = stationary_from(e);
  out.z = model.potentials().transpose() * out.stationary;

  out.transitions = Mat::Zero(k, k);
  const Mat& m = e.transfer.m;
  for (int a = 0; a < k; ++a) {
    double row_total = 0.0;
    for (int b = 0; b < k; ++b) {
      out.transitions(a, b) = m(a, b) * e.right(b);
      row_total += out.transitions(a, b);
    }
    if (row_total > 0.0) {
      // Equals M[a][b] r[b] / (lambda r[a]) up to rounding; normalizing the
      // row keeps Q stochastic when r[a] underflows.
      out.transitions.row(a) /= row_total;
    } else {
      out.transitions.row(a) = model.adjacency().row(a) / model.adjacency().row(a).sum();
    }
  }

  out.entropy = markov_entropy(m, e.right, out.stationary);
  return out;
}

double RotationSet::distance(const Vec& z) const { return hull_distance(extreme_points, z); }

Vec RotationSet::centroid() const {
  Vec c = Vec::Zero(ambient_dim());
  for (const auto& p : extreme_points) c += p;
  return c / static_cast<double>(extreme_points.size());
}

double RotationSet::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < extreme_points.size(); ++i)
    for (std::size_t j = i + 1; j < extreme_points.size(); ++j)
      d = std::max(d, (extreme_points[i] - extreme_points[j]).norm());
  return d;
}

namespace {

RotationSet finish_rotation_set(PointSet means, int ambient) {
  RotationSet set;
  set.extreme_points = extreme_points(means);
  const AffineHull hull = affine_hull(set.extreme_points);
  set.effective_dim = hull.dim();
  if (set.effective_dim < ambient) set.affine_hull = hull;
  set.bounding_box.assign(ambient, {0.0, 0.0});
  for (int j = 0; j < ambient; ++j) {
    double lo = set.extreme_points.front()(j), hi = lo;
    for (const auto& p : set.extreme_points) {
      lo = std::min(lo, p(j));
      hi = std::max(hi, p(j));
    }
    set.bounding_box[j] = {lo, hi};
  }
  return set;
}

PointSet simple_cycle_means(const ShiftModel& model, long max_cycles) {
  const int k = model.alphabet_size();
  const Mat& adj = model.adjacency();
  const Mat& phi = model.potentials();
  PointSet means;
  long cycles = 0;

  // Each simple cycle is enumerated once, from its smallest letter.
  std::vector<int> path;
  std::vector<int> cursor;
  for (int s = 0; s < k; ++s) {
    std::uint32_t on_path = 1u << s;
    path.assign(1, s);
    cursor.assign(1, s);
    Vec sum = phi.row(s).transpose();
    while (!path.empty()) {
      const int u = path.back();
      int& next = cursor.back();
      bool advanced = false;
      while (next < k) {
        const int v = next++;
        if (adj(u, v) == 0.0) continue;
        if (v == s) {
          if (++cycles > max_cycles)
            throw Error(ErrorKind::CycleBudgetExceeded,
                        "more than " + std::to_string(max_cycles) + " simple cycles");
          means.push_back(sum / static_cast<double>(path.size()));
          continue;
        }
        if (v < s || (on_path & (1u << v))) continue;
        path.push_back(v);
        cursor.push_back(s);
        on_path |= 1u << v;
        sum += phi.row(v).transpose();
        advanced = true;
        break;
      }
      if (!advanced) {
        on_path &= ~(1u << u);
        if (path.size() > 1) sum -= phi.row(u).transpose();
        path.pop_back();
        cursor.pop_back();
      }
    }
  }
  return means;
}

}  // namespace

RotationSet rotation_set(const ShiftModel& model, const RotationSetOptions& options) {
  const int k = model.alphabet_size();
  const int d = model.dim();
  const Mat& phi = model.potentials();

  // With a loop at every letter, every cycle mean is a convex combination of
  // the loop means, i.e. of the rows of Phi.
  if (model.adjacency().diagonal().minCoeff() == 1.0) {
    PointSet rows;
    for (int a = 0; a < k; ++a) rows.push_back(phi.row(a).transpose());
    return finish_rotation_set(std::move(rows), d);
  }

  if (k <= options.max_letters) return finish_rotation_set(simple_cycle_means(model, options.max_cycles), d);

  if (!options.allow_fallback)
    throw Error(ErrorKind::CycleBudgetExceeded,
                "alphabet of " + std::to_string(k) + " letters exceeds the cycle-enumeration bound");

  // Coarse sampling of potential averages; the result is flagged approximate.
  PointSet samples;
  const int per_axis = d <= 2 ? 9 : 5;
  std::vector<int> idx(d, 0);
  const double span = 30.0;
  while (true) {
    Vec y(d);
    for (int j = 0; j < d; ++j) y(j) = -span + 2.0 * span * idx[j] / (per_axis - 1);
    samples.push_back(pressure_gradient(model, y).z);
    int j = 0;
    while (j < d && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == d) break;
  }
  RotationSet sampled = finish_rotation_set(samples, d);
  PointSet corners;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec c(d);
    for (int j = 0; j < d; ++j) c(j) = (mask >> j) & 1 ? sampled.bounding_box[j].second : sampled.bounding_box[j].first;
    corners.push_back(c);
  }
  RotationSet box = finish_rotation_set(corners, d);
  box.effective_dim = sampled.effective_dim;
  box.affine_hull = sampled.affine_hull;
  box.approximate = true;
  return box;
}

Vec PotentialReduction::project(const Vec& z) const {
  Vec out(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out(static_cast<Eigen::Index>(i)) = z(kept[i]);
  return out;
}

Vec PotentialReduction::embed_dual(const Vec& reduced_y) const {
  Vec y = Vec::Zero(lift.linear.rows());
  for (std::size_t i = 0; i < kept.size(); ++i) y(kept[i]) = reduced_y(static_cast<Eigen::Index>(i));
  return y;
}

PotentialReduction reduce_potentials(const ShiftModel& model) {
  const int d = model.dim();
  const RotationSet& rot = model.rotation();
  if (rot.effective_dim == d) {
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    return {model, {Mat::Identity(d, d), Vec::Zero(d)}, all, true};
  }

  // Directions spanned by the rotation set.
  const PointSet& pts = rot.extreme_points;
  const Eigen::Index m = static_cast<Eigen::Index>(pts.size()) - 1;
  Mat diffs(std::max<Eigen::Index>(m, 1), d);
  diffs.setZero();
  for (Eigen::Index i = 0; i < m; ++i) diffs.row(i) = (pts[i + 1] - pts[0]).transpose();

  // Pivoted selection: at each step take the lowest-index column whose part
  // orthogonal to the kept ones is within a factor 2 of the largest. Keeps
  // the reduced dual well scaled when one potential barely varies.
  std::vector<int> kept;
  Mat residual = diffs;
  const double scale = std::max(1.0, diffs.cwiseAbs().maxCoeff());
  for (int step = 0; step < rot.effective_dim; ++step) {
    double best = 0.0;
    for (int j = 0; j < d; ++j)
      if (std::find(kept.begin(), kept.end(), j) == kept.end()) best = std::max(best, residual.col(j).norm());
    if (best <= 1e-10 * scale) break;
    int pick = -1;
    for (int j = 0; j < d && pick < 0; ++j)
      if (std::find(kept.begin(), kept.end(), j) == kept.end() && residual.col(j).norm() >= 0.5 * best) pick = j;
    kept.push_back(pick);
    const Vec u = residual.col(pick).normalized();
    residual -= u * (u.transpose() * residual);
  }
  std::sort(kept.begin(), kept.end());

  const int r = static_cast<int>(kept.size());
  Mat kept_diffs(diffs.rows(), r);
  for (int i = 0; i < r; ++i) kept_diffs.col(i) = diffs.col(kept[i]);
  // Every column j is an exact linear function of the kept columns on the
  // rotation set: diffs.col(j) = kept_diffs * coeff.
  Mat linear = Mat::Zero(d, r);
  Vec offset = Vec::Zero(d);
  const auto solver = kept_diffs.completeOrthogonalDecomposition();
  for (int j = 0; j < d; ++j) {
    const auto pos = std::find(kept.begin(), kept.end(), j);
    if (pos != kept.end()) {
      linear(j, static_cast<Eigen::Index>(pos - kept.begin())) = 1.0;
      continue;
    }
    const Vec coeff = solver.solve(diffs.col(j));
    linear.row(j) = coeff.transpose();
    double base = pts[0](j);
    for (int i = 0; i < r; ++i) base -= coeff(i) * pts[0](kept[i]);
    offset(j) = base;
  }

  RawModel raw = model.to_raw();
  for (auto& row : raw.potentials) {
    std::vector<double> reduced;
    for (int j : kept) reduced.push_back(row[j]);
    row = std::move(reduced);
  }
  if (r == 0) throw Error(ErrorKind::EmptyInterior, "rotation set is a single point");
  return {validate_model(raw), {linear, offset}, kept, false};
}

}  // namespace thermoform
