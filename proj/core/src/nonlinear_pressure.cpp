#include "thermoform/nonlinear_pressure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "thermoform/error.hpp"
#include "thermoform/parallel.hpp"

namespace thermoform {

std::string_view to_string(CriticalKind kind) noexcept {
  switch (kind) {
    case CriticalKind::local_max: return "local_max";
    case CriticalKind::local_min: return "local_min";
    case CriticalKind::saddle: return "saddle";
  }
  return "unknown";
}

namespace {

constexpr double kShrink = 1e-3;
constexpr int kApproachSteps = 40;
constexpr double kMaxStep = 10.0;

struct Probe {
  Vec z;
  Vec dual;
  double h = 0.0;
  bool vertex = false;
  EntropyStatus status = EntropyStatus::interior;
};

// beta-independent data of a (reduced, full-dimensional) model.
struct Landscape {
  std::vector<Vec> start_duals;
  std::vector<Probe> probes;
};

bool inside_shrunk(const RotationSet& rot, const PointSet& shrunk, const Vec& z) {
  if (z.size() == 1) {
    const double lo = std::min(shrunk.front()(0), shrunk.back()(0));
    const double hi = std::max(shrunk.front()(0), shrunk.back()(0));
    return z(0) >= lo && z(0) <= hi;
  }
  if (z.size() == 2 && rot.effective_dim == 2) return Polygon(shrunk).depth(z) >= 0.0;
  return hull_distance(shrunk, z) <= 1e-12;
}

int axis_count(int per_axis, int max_starts, int d) {
  long total = 1;
  for (int j = 0; j < d; ++j) total *= per_axis;
  if (total <= max_starts) return per_axis;
  int n = static_cast<int>(std::floor(std::pow(static_cast<double>(max_starts), 1.0 / d) + 1e-9));
  while (n > 1 && std::pow(n, d) > max_starts) --n;
  return std::max(n, 1);
}

std::shared_ptr<const Landscape> landscape(const ShiftModel& m, const NlOptions& options) {
  const std::string key =
      "landscape:" + std::to_string(options.starts_per_axis) + ":" + std::to_string(options.max_starts);
  auto made = m.memo(key, [&]() -> std::shared_ptr<const void> {
    auto land = std::make_shared<Landscape>();
    const RotationSet& rot = m.rotation();
    const int d = m.dim();
    const Vec c = rot.centroid();
    PointSet shrunk;
    for (const auto& v : rot.extreme_points) shrunk.push_back(c + (1.0 - kShrink) * (v - c));

    const int n = axis_count(options.starts_per_axis, options.max_starts, d);
    std::vector<Vec> cells;
    std::vector<int> idx(d, 0);
    while (true) {
      Vec z(d);
      for (int j = 0; j < d; ++j) {
        const auto [lo, hi] = rot.bounding_box[j];
        z(j) = lo + (hi - lo) * (idx[j] + 0.5) / n;
      }
      if (inside_shrunk(rot, shrunk, z)) cells.push_back(z);
      int j = d - 1;
      while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
      if (j < 0) break;
    }
    if (cells.empty()) cells.push_back(c);
    std::vector<std::optional<Vec>> duals(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
      const EntropyEvaluation e = entropy_at(m, cells[i]);
      if (e.status == EntropyStatus::interior) duals[i] = e.dual_y;
    });
    for (auto& y : duals)
      if (y) land->start_duals.push_back(*y);

    std::vector<std::vector<Probe>> per_vertex(rot.extreme_points.size());
    parallel_for(rot.extreme_points.size(), [&](std::size_t vi) {
      const Vec& v = rot.extreme_points[vi];
      auto& out = per_vertex[vi];
      const EntropyEvaluation ev = entropy_at(m, v);
      out.push_back({v, ev.dual_y, ev.h, true, ev.status});
      Vec warm = Vec::Zero(d);
      double scale = 1.0;
      for (int i = 1; i <= kApproachSteps; ++i) {
        scale *= 0.5;
        const Vec p = v + scale * (c - v);
        const EntropyEvaluation e = entropy_at(m, p, {}, &warm);
        if (e.status == EntropyStatus::outside) continue;
        out.push_back({p, e.dual_y, e.h, false, e.status});
        warm = e.dual_y;
      }
    });
    for (auto& list : per_vertex)
      for (auto& p : list) land->probes.push_back(std::move(p));
    return land;
  });
  return std::static_pointer_cast<const Landscape>(made);
}

struct YPoint {
  Vec y;
  Vec z;
  double h = 0.0;
  double g = 0.0;
  double d_h = 1.0;
  Vec v;  // d_z G / d_h G - y; zero at critical points
  bool finite = true;
};

YPoint eval_y(const ShiftModel& m, const NonlinearEnergy& energy, const Vec& y) {
  const PressureGradient pg = pressure_gradient(m, y);
  YPoint p;
  p.y = y;
  p.z = pg.z;
  p.h = pg.entropy;
  const EnergyJet jet = energy.jet(p.h, pg.z);
  p.g = jet.value;
  p.d_h = jet.d_h;
  p.v = jet.d_z / jet.d_h - y;
  p.finite = std::isfinite(p.g) && p.v.allFinite() && jet.d_h > 0.0;
  return p;
}

Mat jacobian_v(const ShiftModel& m, const NonlinearEnergy& energy, const Vec& y) {
  const Eigen::Index d = y.size();
  Mat j(d, d);
  const double step = 1e-6 * (1.0 + y.norm());
  for (Eigen::Index c = 0; c < d; ++c) {
    Vec up = y, down = y;
    up(c) += step;
    down(c) -= step;
    j.col(c) = (eval_y(m, energy, up).v - eval_y(m, energy, down).v) / (2.0 * step);
  }
  return j;
}

Mat jacobian_z(const ShiftModel& m, const Vec& y) {
  const Eigen::Index d = y.size();
  Mat h(d, d);
  const double step = 1e-5;
  for (Eigen::Index c = 0; c < d; ++c) {
    Vec up = y, down = y;
    up(c) += step;
    down(c) -= step;
    h.col(c) = (pressure_gradient(m, up).z - pressure_gradient(m, down).z) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

struct Ascent {
  YPoint point;
  bool capped = false;
  bool is_max = false;
  bool degenerate = false;
};

Vec clip(Vec y, double radius, bool& capped) {
  const double n = y.norm();
  if (n > radius) {
    y *= radius / n;
    capped = true;
  }
  return y;
}

// Newton on v(y) = 0 with a finite-difference Jacobian; steps are kept only
// when they reduce |v| without lowering g.
YPoint polish(const ShiftModel& m, const NonlinearEnergy& energy, YPoint cur, double y_max) {
  const YPoint start = cur;
  for (int it = 0; it < 80; ++it) {
    const double nv = cur.v.norm();
    if (nv <= 1e-15 * (1.0 + cur.y.norm())) break;
    const Mat j = jacobian_v(m, energy, cur.y);
    const Vec dir = j.fullPivLu().solve(-cur.v);
    if (!dir.allFinite()) break;
    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving < 12; ++halving, t *= 0.5) {
      bool capped = false;
      const Vec trial = clip(cur.y + t * dir, y_max, capped);
      if (capped) continue;
      const YPoint next = eval_y(m, energy, trial);
      if (next.finite && next.v.norm() < nv && next.g >= cur.g - 1e-14 * (1.0 + std::abs(cur.g))) {
        cur = next;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (cur.g < start.g - 1e-13 * (1.0 + std::abs(start.g))) return start;
  return cur;
}

// Midpoint of {t : g(y + t u) >= g(y) - tol}, the flat top of a degenerate
// maximum along u. Empty when g rises above the top along u, i.e. the point
// is a degenerate saddle rather than a plateau.
std::optional<YPoint> plateau_midpoint(const ShiftModel& m, const NonlinearEnergy& energy, const YPoint& top,
                                       const Vec& u, double tol, double y_max) {
  const double floor = top.g - tol;
  const double ceiling = top.g + tol;
  bool rises = false;
  auto edge = [&](double sign) {
    double good = 0.0, bad = 1e-4 * (1.0 + top.y.norm());
    while (true) {
      bool capped = false;
      const Vec y = clip(top.y + sign * bad * u, y_max, capped);
      if (capped || bad > 1e3) return good;
      const YPoint p = eval_y(m, energy, y);
      if (!p.finite || p.g < floor) break;
      if (p.g > ceiling) {
        rises = true;
        return good;
      }
      good = bad;
      bad *= 2.0;
    }
    for (int i = 0; i < 80 && bad - good > 1e-15 * (1.0 + bad); ++i) {
      const double mid = 0.5 * (good + bad);
      const YPoint p = eval_y(m, energy, top.y + sign * mid * u);
      if (p.finite && p.g > ceiling) {
        rises = true;
        return good;
      }
      if (p.finite && p.g >= floor) good = mid;
      else bad = mid;
    }
    return good;
  };
  const double plus = edge(1.0);
  const double minus = edge(-1.0);
  if (rises) return std::nullopt;
  const YPoint mid = eval_y(m, energy, top.y + 0.5 * (plus - minus) * u);
  return mid.finite ? mid : top;
}

Ascent ascend(const ShiftModel& m, const NonlinearEnergy& energy, const Vec& y0, const NlOptions& options) {
  Ascent out;
  bool capped = false;
  YPoint cur = eval_y(m, energy, clip(y0, options.y_ascent_max, capped));
  if (!cur.finite) {
    out.capped = true;
    out.point = cur;
    return out;
  }
  for (int it = 0; it < options.max_ascent_iterations; ++it) {
    const double nv = cur.v.norm();
    if (nv <= 1e-10 * (1.0 + cur.y.norm())) break;
    const Vec step = nv > kMaxStep ? Vec(cur.v * (kMaxStep / nv)) : cur.v;
    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving < 50; ++halving, t *= 0.5) {
      bool hit = false;
      const Vec trial = clip(cur.y + t * step, options.y_ascent_max, hit);
      const YPoint next = eval_y(m, energy, trial);
      if (!next.finite) continue;
      if (next.g > cur.g || (next.g >= cur.g - 1e-15 * (1.0 + std::abs(cur.g)) && next.v.norm() < nv)) {
        cur = next;
        capped = hit;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if (capped) {
      out.capped = true;
      out.point = cur;
      return out;
    }
  }
  cur = polish(m, energy, cur, options.y_ascent_max);
  out.point = cur;
  // A point that is not critical sits where g has flattened out towards the
  // boundary; boundary probes account for it.
  if (cur.y.norm() >= options.y_ascent_max * (1.0 - 1e-12) || cur.v.norm() > 1e-6 * (1.0 + cur.y.norm())) {
    out.capped = true;
    return out;
  }

  // Second-order test: the Hessian of y -> g is d_h G * H J with H = dz/dy.
  const Mat h = jacobian_z(m, cur.y);
  const Mat j = jacobian_v(m, energy, cur.y);
  const Mat hj = h * j;
  const Mat sym = 0.5 * (hj + hj.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const Vec& lambda = eig.eigenvalues();
  const double threshold = 1e-6 * std::max(h.norm(), 1e-300);
  if (lambda.maxCoeff() > threshold) return out;  // saddle or minimum
  out.is_max = true;
  // Degenerate when v(y) = 0 is singular; a flat z(y) alone (saturation near
  // a vertex) is not.
  const Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeFullV);
  const Eigen::Index last = svd.singularValues().size() - 1;
  if (svd.singularValues()(last) < 1e-6) {
    const Vec u = svd.matrixV().col(last).normalized();
    const auto mid = plateau_midpoint(m, energy, cur, u, options.tol_value, options.y_ascent_max);
    if (!mid) {
      out.is_max = false;
      return out;
    }
    out.degenerate = true;
    out.point = *mid;
  }
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

struct Cluster {
  YPoint point;
  bool degenerate = false;
};

std::vector<Cluster> cluster_maxima(const ShiftModel& m, const NonlinearEnergy& energy, const std::vector<Ascent>& found,
                                    const NlOptions& options, const AffineMap& lift) {
  std::vector<const Ascent*> maxima;
  for (const auto& a : found)
    if (a.is_max && !a.capped) maxima.push_back(&a);
  const int n = static_cast<int>(maxima.size());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((lift.apply(maxima[i]->point.z) - lift.apply(maxima[j]->point.z)).norm() < options.tol_cluster) uf.unite(i, j);

  auto build = [&](UnionFind& sets) {
    std::vector<int> roots;
    std::vector<std::vector<int>> members(n);
    for (int i = 0; i < n; ++i) {
      const int r = sets.find(i);
      if (members[r].empty()) roots.push_back(r);
      members[r].push_back(i);
    }
    std::vector<Cluster> out;
    for (int r : roots) {
      Vec y = Vec::Zero(maxima[r]->point.y.size());
      bool degenerate = false;
      double best = -std::numeric_limits<double>::infinity();
      const YPoint* best_point = nullptr;
      for (int i : members[r]) {
        y += maxima[i]->point.y;
        degenerate = degenerate || maxima[i]->degenerate;
        if (maxima[i]->point.g > best) {
          best = maxima[i]->point.g;
          best_point = &maxima[i]->point;
        }
      }
      y /= static_cast<double>(members[r].size());
      YPoint mean = eval_y(m, energy, y);
      // A mean of scattered members can fall off a sharp peak.
      if (!mean.finite || mean.g < best - options.tol_value) mean = *best_point;
      out.push_back({mean, degenerate});
    }
    return out;
  };

  std::vector<Cluster> clusters = build(uf);
  // Tied maxima joined by a flat ridge are one plateau.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < clusters.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b) {
        const YPoint& pa = clusters[a].point;
        const YPoint& pb = clusters[b].point;
        if (std::abs(pa.g - pb.g) >= options.tol_value) continue;
        const double top = std::max(pa.g, pb.g);
        bool flat = true;
        for (int s = 1; s <= 8 && flat; ++s) {
          const double t = s / 9.0;
          const YPoint p = eval_y(m, energy, (1.0 - t) * pa.y + t * pb.y);
          flat = p.finite && p.g >= top - options.tol_value;
        }
        if (!flat) continue;
        const YPoint mid = eval_y(m, energy, 0.5 * (pa.y + pb.y));
        clusters[a] = {mid.finite && mid.g >= top - options.tol_value ? mid : (pa.g >= pb.g ? pa : pb), true};
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
        merged = true;
      }
  }
  return clusters;
}

}  // namespace

EquilibriumReport nl_pressure(const ShiftModel& model, const NonlinearEnergy& energy, const NlOptions& options) {
  if (model.rotation().effective_dim == 0)
    throw Error(ErrorKind::EmptyInterior, "rotation set is a single point");
  energy.check_admissible(model);

  const PotentialReduction& red = model.reduction();
  const ShiftModel& m = red.model;
  const NonlinearEnergy g = red.identity ? energy : energy.composed(red.lift);
  const auto land = landscape(m, options);

  std::vector<Ascent> found(land->start_duals.size());
  parallel_for(found.size(), [&](std::size_t i) { found[i] = ascend(m, g, land->start_duals[i], options); });

  auto best_interior = [&](const std::vector<Ascent>& list) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& a : list)
      if (a.is_max && !a.capped) best = std::max(best, a.point.g);
    return best;
  };

  // Probes near the boundary that beat every interior maximum seed more ascents.
  const double preliminary = best_interior(found);
  std::vector<Vec> seeds;
  std::vector<double> probe_g(land->probes.size());
  for (std::size_t i = 0; i < land->probes.size(); ++i) {
    const Probe& p = land->probes[i];
    probe_g[i] = g.value(p.h, p.z);
    if (!p.vertex && p.status == EntropyStatus::interior && probe_g[i] > preliminary + options.tol_value)
      seeds.push_back(p.dual);
  }
  if (!seeds.empty()) {
    std::vector<Ascent> extra(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) { extra[i] = ascend(m, g, seeds[i], options); });
    for (auto& a : extra) found.push_back(std::move(a));
  }

  const std::vector<Cluster> clusters = cluster_maxima(m, g, found, options, red.lift);
  double interior = -std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) interior = std::max(interior, c.point.g);

  double boundary = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < land->probes.size(); ++i)
    if (land->probes[i].vertex) boundary = std::max(boundary, probe_g[i]);

  EquilibriumReport report;
  for (const auto& c : clusters) {
    report.local_maxima.push_back({red.lift.apply(c.point.z), c.point.z, c.point.y, c.point.g, c.degenerate});
  }
  std::sort(report.local_maxima.begin(), report.local_maxima.end(),
            [](const LocalMaximum& a, const LocalMaximum& b) { return lex_less(a.z, b.z); });

  if (boundary > interior + options.tol_value) {
    report.pressure = boundary;
    for (std::size_t i = 0; i < land->probes.size(); ++i) {
      const Probe& p = land->probes[i];
      if (!p.vertex || probe_g[i] < boundary - options.tol_value) continue;
      EquilibriumValue v;
      v.z_reduced = p.z;
      v.z = red.lift.apply(p.z);
      v.dual_reduced = p.dual;
      v.dual = red.embed_dual(p.dual);
      v.g = probe_g[i];
      v.on_boundary = true;
      report.values.push_back(std::move(v));
    }
  } else {
    if (clusters.empty())
      throw Error(ErrorKind::NoConvergence, "no interior maximum found and no boundary value dominates");
    report.pressure = interior;
    for (const auto& c : clusters) {
      if (c.point.g < interior - options.tol_value) continue;
      EquilibriumValue v;
      v.z_reduced = c.point.z;
      v.z = red.lift.apply(c.point.z);
      v.dual_reduced = c.point.y;
      v.dual = red.embed_dual(c.point.y);
      v.g = c.point.g;
      report.values.push_back(std::move(v));
    }
  }
  std::sort(report.values.begin(), report.values.end(),
            [](const EquilibriumValue& a, const EquilibriumValue& b) { return lex_less(a.z, b.z); });
  for (const auto& v : report.values) {
    report.duals.push_back(v.dual);
    report.measures.push_back(linear_pressure(model, v.dual));
    if (v.on_boundary) report.boundary_values.push_back(v.z);
  }
  report.multiplicity = static_cast<int>(report.values.size());
  report.continuum_suspected = report.multiplicity > options.continuum_limit;
  return report;
}

std::vector<PerronData> equilibrium_measures(const ShiftModel& model, const EquilibriumReport& report) {
  std::vector<PerronData> out;
  out.reserve(report.values.size());
  for (const auto& v : report.values) out.push_back(linear_pressure(model, v.dual));
  return out;
}

namespace {

struct DualGrid {
  std::vector<double> z;
  std::vector<double> y;
  std::vector<double> h;
};

std::shared_ptr<const DualGrid> dual_grid(const ShiftModel& m, int n) {
  auto made = m.memo("dual_grid:" + std::to_string(n), [&]() -> std::shared_ptr<const void> {
    auto grid = std::make_shared<DualGrid>();
    const RotationSet& rot = m.rotation();
    const double lo = std::min(rot.extreme_points.front()(0), rot.extreme_points.back()(0));
    const double hi = std::max(rot.extreme_points.front()(0), rot.extreme_points.back()(0));
    const double margin = 1e-7 * (hi - lo);
    grid->z.resize(n);
    grid->y.resize(n);
    grid->h.resize(n);
    // Two chains from the middle outward keep the warm starts close.
    const int mid = n / 2;
    auto run = [&](int from, int to, int step) {
      Vec warm = Vec::Zero(1);
      for (int i = from; i != to; i += step) {
        const double z = i == n - 1 ? hi - margin : lo + margin + (hi - lo - 2.0 * margin) * i / (n - 1);
        Vec zv(1);
        zv << z;
        const EntropyEvaluation e = entropy_at(m, zv, {}, &warm);
        grid->z[i] = z;
        grid->y[i] = e.dual_y(0);
        grid->h[i] = e.h;
        if (e.status == EntropyStatus::interior) warm = e.dual_y;
      }
    };
    run(mid, n, 1);
    run(mid - 1, -1, -1);
    return grid;
  });
  return std::static_pointer_cast<const DualGrid>(made);
}

}  // namespace

std::vector<CriticalPoint> critical_points_1d(const ShiftModel& model, const NonlinearEnergy& energy, int n_scan) {
  const PotentialReduction& red = model.reduction();
  if (red.reduced_dim() != 1)
    throw Error(ErrorKind::DimensionNotOne,
                "critical point scan needs one independent potential, model has " + std::to_string(red.reduced_dim()));
  if (n_scan < 3) throw Error(ErrorKind::InvalidInput, "critical point scan needs at least 3 grid points");
  energy.check_admissible(model);
  const ShiftModel& m = red.model;
  const NonlinearEnergy g = red.identity ? energy : energy.composed(red.lift);
  const auto grid = dual_grid(m, n_scan);

  auto slope = [&](double z, double y, double h) {
    Vec zv(1);
    zv << z;
    const EnergyJet j = g.jet(h, zv);
    return j.d_z(0) / j.d_h - y;
  };
  std::vector<double> s(n_scan);
  for (int i = 0; i < n_scan; ++i) s[i] = slope(grid->z[i], grid->y[i], grid->h[i]);

  auto point_at = [&](double z, double y, double h, CriticalKind kind) {
    CriticalPoint c;
    c.z_reduced = z;
    Vec zv(1);
    zv << z;
    c.z = red.lift.apply(zv);
    c.g = g.value(h, zv);
    c.dual_reduced = y;
    c.kind = kind;
    return c;
  };

  std::vector<CriticalPoint> out;
  auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  for (int i = 0; i + 1 < n_scan; ++i) {
    const int sa = sign(s[i]), sb = sign(s[i + 1]);
    if (sa == 0) {
      const int left = i > 0 ? sign(s[i - 1]) : 0;
      if (i == 0) continue;
      CriticalKind kind = CriticalKind::saddle;
      if (left > 0 && sb < 0) kind = CriticalKind::local_max;
      if (left < 0 && sb > 0) kind = CriticalKind::local_min;
      out.push_back(point_at(grid->z[i], grid->y[i], grid->h[i], kind));
      continue;
    }
    if (sb == 0 || sa == sb) continue;
    double a = grid->z[i], b = grid->z[i + 1];
    Vec warm = Vec::Constant(1, grid->y[i]);
    double ym = grid->y[i], hm = grid->h[i], zm = a;
    for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
      zm = 0.5 * (a + b);
      Vec zv(1);
      zv << zm;
      const EntropyEvaluation e = entropy_at(m, zv, {}, &warm);
      ym = e.dual_y(0);
      hm = e.h;
      const int sm = sign(slope(zm, ym, hm));
      if (sm == 0) break;
      if (sm == sa) a = zm;
      else b = zm;
    }
    zm = 0.5 * (a + b);
    Vec zv(1);
    zv << zm;
    const EntropyEvaluation e = entropy_at(m, zv, {}, &warm);
    out.push_back(point_at(zm, e.dual_y(0), e.h, sa > 0 ? CriticalKind::local_max : CriticalKind::local_min));
  }
  return out;
}

}  // namespace thermoform
