#include "thermoform/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "thermoform/convex.hpp"
#include "thermoform/error.hpp"
#include "thermoform/parallel.hpp"

namespace thermoform {

std::string_view to_string(TransitionKind kind) noexcept {
  switch (kind) {
    case TransitionKind::count_change: return "count_change";
    case TransitionKind::kink_first_order: return "kink_first_order";
    case TransitionKind::metastable_onset: return "metastable_onset";
    case TransitionKind::freezing_onset: return "freezing_onset";
  }
  return "unknown";
}

std::vector<double> beta_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
    throw Error(ErrorKind::InvalidInput, "beta range needs lo <= hi and a positive step");
  const auto n = static_cast<long>(std::floor((hi - lo) / step * (1.0 + 1e-12) + 1e-6));
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

namespace {

struct Maximum {
  Vec z;
  double g = 0.0;
  bool on_boundary = false;
};

struct Snapshot {
  double beta = 0.0;
  EquilibriumReport report;
  std::vector<Maximum> maxima;         // interior maxima, then boundary values
  std::vector<CriticalPoint> critical;  // d = 1 only
  int interior_count = 0;
  int global = -1;
};

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

Snapshot take(const ShiftModel& model, const NonlinearEnergy& energy1, double beta, bool one_d,
              const ScanOptions& options) {
  Snapshot s;
  s.beta = beta;
  const NonlinearEnergy energy = energy1.with_beta(beta);
  s.report = nl_pressure(model, energy, options.nl);
  if (one_d) {
    s.critical = critical_points_1d(model, energy, options.n_scan);
    for (const auto& c : s.critical)
      if (c.kind == CriticalKind::local_max) s.maxima.push_back({c.z, c.g, false});
  }
  for (const auto& m : s.report.local_maxima) {
    bool known = false;
    for (const auto& x : s.maxima) known = known || (x.z - m.z).norm() < 1e-6;
    if (!known) s.maxima.push_back({m.z, m.g, false});
  }
  std::sort(s.maxima.begin(), s.maxima.end(), [](const Maximum& a, const Maximum& b) { return lex_less(a.z, b.z); });
  s.interior_count = static_cast<int>(s.maxima.size());
  for (const auto& v : s.report.values)
    if (v.on_boundary) s.maxima.push_back({v.z, v.g, true});

  const Vec& top = s.report.values.front().z;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.maxima.size(); ++i) {
    const double d = (s.maxima[i].z - top).norm();
    if (d < best) {
      best = d;
      s.global = static_cast<int>(i);
    }
  }
  return s;
}

// Greedy nearest matching of current maxima to previous ones; -1 marks a
// newborn maximum.
std::vector<int> match(const Snapshot& prev, const Snapshot& cur) {
  struct Pair {
    double d;
    int p, c;
  };
  std::vector<Pair> pairs;
  for (std::size_t p = 0; p < prev.maxima.size(); ++p)
    for (std::size_t c = 0; c < cur.maxima.size(); ++c)
      pairs.push_back({(prev.maxima[p].z - cur.maxima[c].z).norm(), static_cast<int>(p), static_cast<int>(c)});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
  std::vector<int> to_prev(cur.maxima.size(), -1);
  std::vector<bool> used(prev.maxima.size(), false);
  for (const auto& pr : pairs) {
    if (used[pr.p] || to_prev[pr.c] >= 0) continue;
    used[pr.p] = true;
    to_prev[pr.c] = pr.p;
  }

  if (prev.maxima.size() == cur.maxima.size() && prev.maxima.size() > 1) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < prev.maxima.size(); ++a)
      for (std::size_t b = a + 1; b < prev.maxima.size(); ++b)
        gap = std::min(gap, (prev.maxima[a].z - prev.maxima[b].z).norm());
    for (std::size_t c = 0; c < cur.maxima.size(); ++c) {
      const double disp = (cur.maxima[c].z - prev.maxima[to_prev[c]].z).norm();
      if (disp > 0.5 * gap)
        throw Error(ErrorKind::GridTooCoarse, "branch continuation between beta = " + std::to_string(prev.beta) +
                                                  " and " + std::to_string(cur.beta) + " is ambiguous");
    }
  }
  return to_prev;
}

double bisect(double lo, double hi, double tol, const std::function<bool(double)>& left_like) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (left_like(mid)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// d/dbeta of G_beta(h; z) at fixed (h, z).
double beta_derivative(const ShiftModel& model, const NonlinearEnergy& energy1, double beta, const Vec& z) {
  if (energy1.potential_form()) return energy1.with_beta(1.0).potential_value(z);
  const double h = entropy_at(model, z).h;
  const double step = 1e-6 * (1.0 + std::abs(beta));
  return (energy1.with_beta(beta + step).value(h, z) - energy1.with_beta(beta - step).value(h, z)) / (2.0 * step);
}

// Every old maximum is still a maximum: its nearest critical point on the
// right is a local max (excludes pitchforks, where the old max turns into a
// min), and no maximum disappears.
bool old_maxima_persist(const Snapshot& left, const Snapshot& right, const std::vector<int>& to_prev) {
  std::vector<bool> seen(left.interior_count, false);
  for (int c = 0; c < right.interior_count; ++c)
    if (to_prev[c] >= 0 && to_prev[c] < left.interior_count) seen[to_prev[c]] = true;
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return false;
  if (right.critical.empty()) return true;
  for (int p = 0; p < left.interior_count; ++p) {
    const Vec& z = left.maxima[p].z;
    const CriticalPoint* closest = nullptr;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : right.critical) {
      const double e = (c.z - z).norm();
      if (e < d) {
        d = e;
        closest = &c;
      }
    }
    if (!closest || closest->kind != CriticalKind::local_max) return false;
  }
  return true;
}

}  // namespace

BetaScan scan(const ShiftModel& model, const NonlinearEnergy& energy1, const std::vector<double>& betas,
              const ScanOptions& options) {
  if (betas.size() < 3) throw Error(ErrorKind::InvalidInput, "a scan needs at least 3 beta values");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!std::isfinite(betas[i])) throw Error(ErrorKind::InvalidInput, "beta values must be finite");
    if (i && !(betas[i] > betas[i - 1])) throw Error(ErrorKind::InvalidInput, "beta grid must be strictly ascending");
  }
  const bool one_d = model.reduction().reduced_dim() == 1;

  std::vector<Snapshot> snaps(betas.size());
  parallel_for(betas.size(), [&](std::size_t i) { snaps[i] = take(model, energy1, betas[i], one_d, options); });

  BetaScan out;
  out.betas = betas;
  std::vector<std::vector<int>> ids(snaps.size());
  int next_id = 0;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    ids[i].assign(snaps[i].maxima.size(), -1);
    if (i == 0) {
      for (auto& id : ids[i]) id = next_id++;
    } else {
      const std::vector<int> to_prev = match(snaps[i - 1], snaps[i]);
      for (std::size_t c = 0; c < to_prev.size(); ++c) ids[i][c] = to_prev[c] >= 0 ? ids[i - 1][to_prev[c]] : next_id++;
    }
    out.pressures.push_back(snaps[i].report.pressure);
    out.counts.push_back(snaps[i].report.multiplicity);
    std::vector<BranchPoint> row;
    for (std::size_t c = 0; c < snaps[i].maxima.size(); ++c) {
      const Maximum& m = snaps[i].maxima[c];
      row.push_back({ids[i][c], m.z, m.g, m.g >= snaps[i].report.pressure - options.nl.tol_value, m.on_boundary});
    }
    out.value_branches.push_back(std::move(row));
    out.global_branch.push_back(ids[i][snaps[i].global]);
  }
  out.branch_count = next_id;

  const std::size_t n = betas.size();
  std::vector<double> second(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h = 0.5 * (betas[i + 1] - betas[i - 1]);
    second[i] = std::abs(out.pressures[i + 1] - 2.0 * out.pressures[i] + out.pressures[i - 1]) / h;
  }
  auto noise_floor = [&](std::size_t i) {
    std::vector<double> window;
    for (std::size_t j = (i > 5 ? i - 5 : 1); j <= std::min(n - 2, i + 5); ++j)
      if (j >= 1 && j + 1 < n) window.push_back(second[j]);
    if (window.empty()) return 0.0;
    std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2), window.end());
    return 10.0 * window[window.size() / 2];
  };

  auto evidence = [&](std::size_t i) {
    TransitionEvidence e;
    e.left_count = out.counts[i];
    e.right_count = out.counts[i + 1];
    e.grid_left = betas[i];
    e.grid_right = betas[i + 1];
    const std::size_t j = std::min(std::max<std::size_t>(i, 1), n - 2);
    e.second_difference = second[j];
    e.noise_floor = noise_floor(j);
    return e;
  };

  auto probe = [&](double beta) { return take(model, energy1, beta, one_d, options); };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Snapshot& left = snaps[i];
    const Snapshot& right = snaps[i + 1];

    if (left.report.multiplicity != right.report.multiplicity) {
      TransitionEvent ev{TransitionKind::count_change, 0.5 * (betas[i] + betas[i + 1]), evidence(i)};
      if (options.refine) {
        const int want = left.report.multiplicity;
        ev.beta = bisect(betas[i], betas[i + 1], options.beta_tol,
                         [&](double b) { return probe(b).report.multiplicity == want; });
      }
      ev.evidence.branches = {ids[i][left.global], ids[i + 1][right.global]};
      out.events.push_back(std::move(ev));
    }

    // Metastable onset: a new maximum is born while the old ones persist.
    const std::vector<int> to_prev = match(left, right);
    if (right.interior_count > left.interior_count && left.interior_count > 0 &&
        old_maxima_persist(left, right, to_prev)) {
      TransitionEvent ev{TransitionKind::metastable_onset, 0.5 * (betas[i] + betas[i + 1]), evidence(i)};
      for (int c = 0; c < right.interior_count; ++c)
        if (to_prev[c] < 0) ev.evidence.branches.push_back(ids[i + 1][c]);
      if (options.refine) {
        const int want = left.interior_count;
        ev.beta = bisect(betas[i], betas[i + 1], options.beta_tol,
                         [&](double b) { return probe(b).interior_count == want; });
      }
      out.events.push_back(std::move(ev));
    }

    const int ga = ids[i][left.global];
    const int gb = ids[i + 1][right.global];
    auto position = [](const std::vector<int>& row, int id) {
      return static_cast<int>(std::find(row.begin(), row.end(), id) - row.begin());
    };
    const int a_right = position(ids[i + 1], ga);
    const int b_left = position(ids[i], gb);
    // A genuine switch: both branches exist on both sides, and each is global
    // on one side only (symmetric tied branches trade places freely).
    if (ga != gb && a_right < static_cast<int>(ids[i + 1].size()) && b_left < static_cast<int>(ids[i].size()) &&
        !out.value_branches[i + 1][a_right].is_global && !out.value_branches[i][b_left].is_global &&
        !right.maxima[right.global].on_boundary && !left.maxima[left.global].on_boundary) {
      const Vec za = left.maxima[left.global].z;
      double lo = betas[i], hi = betas[i + 1];
      if (options.refine) {
        // Left-like while the branch nearest to z_A is still global.
        while (hi - lo > options.beta_tol) {
          const double mid = 0.5 * (lo + hi);
          const Snapshot s = probe(mid);
          double best = std::numeric_limits<double>::infinity();
          double g = -std::numeric_limits<double>::infinity();
          for (const auto& m : s.maxima) {
            const double d = (m.z - za).norm();
            if (d < best) {
              best = d;
              g = m.g;
            }
          }
          if (g >= s.report.pressure - options.nl.tol_value) lo = mid;
          else hi = mid;
        }
      }
      const Snapshot sl = options.refine ? probe(lo) : left;
      const Snapshot sr = options.refine ? probe(hi) : right;
      auto tracked = [](const Snapshot& s, const Vec& z) {
        const Vec* best = &s.maxima.front().z;
        for (const auto& m : s.maxima)
          if ((m.z - z).norm() < (*best - z).norm()) best = &m.z;
        return *best;
      };
      const Vec zb = right.maxima[right.global].z;
      const double jump = std::abs(beta_derivative(model, energy1, hi, tracked(sr, zb)) -
                                   beta_derivative(model, energy1, lo, tracked(sl, za)));
      if (jump > options.kink_threshold) {
        TransitionEvent ev{TransitionKind::kink_first_order, 0.5 * (lo + hi), evidence(i)};
        ev.evidence.derivative_jump = jump;
        ev.evidence.branches = {ga, gb};
        out.events.push_back(std::move(ev));
      }
    }

    // Freezing onset: the global value moves to a boundary vertex for good.
    if (right.maxima[right.global].on_boundary && !left.maxima[left.global].on_boundary) {
      bool stays = true;
      for (std::size_t j = i + 1; j < n; ++j) stays = stays && snaps[j].maxima[snaps[j].global].on_boundary;
      if (stays) {
        TransitionEvent ev{TransitionKind::freezing_onset, 0.5 * (betas[i] + betas[i + 1]), evidence(i)};
        ev.evidence.branches = {ga, gb};
        if (options.refine) {
          ev.beta = bisect(betas[i], betas[i + 1], options.beta_tol, [&](double b) {
            const Snapshot s = probe(b);
            return !s.maxima[s.global].on_boundary;
          });
        }
        const Snapshot sl = probe(ev.beta - options.beta_tol);
        const Snapshot sr = probe(ev.beta + options.beta_tol);
        ev.evidence.derivative_jump = std::abs(beta_derivative(model, energy1, ev.beta, sr.maxima[sr.global].z) -
                                               beta_derivative(model, energy1, ev.beta, sl.maxima[sl.global].z));
        out.events.push_back(std::move(ev));
      }
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const TransitionEvent& a, const TransitionEvent& b) { return a.beta < b.beta; });
  return out;
}

double potts_critical_beta(int n_letters) {
  if (n_letters < 3) throw Error(ErrorKind::InvalidInput, "the Potts critical point needs at least 3 letters");
  const double n = n_letters;
  return 2.0 * (n - 1.0) / (n - 2.0) * std::log(n - 1.0);
}

double potts_magnetization(int n_letters, double beta) {
  const double beta_c = potts_critical_beta(n_letters);
  if (!std::isfinite(beta)) throw Error(ErrorKind::InvalidInput, "beta must be finite");
  if (beta < beta_c * (1.0 - 1e-12))
    throw Error(ErrorKind::BelowCritical, "beta = " + std::to_string(beta) + " is below the critical value " +
                                              std::to_string(beta_c) + "; only s = 0 is an equilibrium");
  const double n = n_letters;
  auto f = [&](double s) {
    const double e = std::exp(-beta * s);
    return s - (1.0 - e) / (1.0 + (n - 1.0) * e);
  };
  // Descending scan from s = 1 for the largest sign change.
  const int steps = 100000;
  double hi = 1.0;
  double lo = -1.0;
  for (int i = steps - 1; i >= 1; --i) {
    const double s = static_cast<double>(i) / steps;
    if (f(s) <= 0.0) {
      lo = s;
      break;
    }
    hi = s;
  }
  if (lo < 0.0) throw Error(ErrorKind::BelowCritical, "no positive magnetization solves the fixed-point equation");
  if (f(lo) == 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= 0.0) lo = mid;
    else hi = mid;
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

Vec potts_value(int n_letters, double s) {
  const double n = n_letters;
  Vec z = Vec::Constant(n_letters, (1.0 - s) / n);
  z(0) = (1.0 + (n - 1.0) * s) / n;
  return z;
}

double freezing_threshold(const std::function<std::optional<double>(double)>& entropy_drop,
                          const std::function<double(double)>& energy_drop, double r) {
  if (!(r < 0.0)) throw Error(ErrorKind::InvalidInput, "freezing needs a rotation set [r, 0] with r < 0");
  auto ratio = [&](double z) -> std::optional<double> {
    const double drop = energy_drop(z);
    if (!(drop > 0.0)) return std::nullopt;
    const auto dh = entropy_drop(z);
    if (!dh) return std::nullopt;
    return *dh / drop;
  };

  std::map<double, double> samples;
  const int n = 2000;
  for (int j = 1; j < n; ++j) {
    const double z = r * (1.0 - static_cast<double>(j) / n);
    if (auto q = ratio(z)) samples[z] = *q;
  }
  double z = r;
  for (int i = 1; i <= 200; ++i) {
    z *= 0.5;
    const auto q = ratio(z);
    if (!q) break;
    samples[z] = *q;
  }
  if (samples.size() < 3) throw Error(ErrorKind::NotFreezingShape, "entropy function could not be sampled");

  std::vector<std::pair<double, double>> pts(samples.begin(), samples.end());  // ascending z
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].second > pts[best].second) best = i;
  const std::size_t inner = pts.size() - 1;  // closest to z = 0
  if (best == inner && pts[inner].second > pts[inner - 1].second * (1.0 + 1e-12) + 1e-300)
    throw Error(ErrorKind::NotFreezingShape,
                "the ratio (h(z) - h(0)) / (F(0) - F(z)) keeps growing as z -> 0; no finite freezing threshold");

  // Golden-section refinement between the neighbours of the best sample.
  double a = pts[best == 0 ? 0 : best - 1].first;
  double b = pts[std::min(best + 1, inner)].first;
  double top = pts[best].second;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  auto value = [&](double x) { return ratio(x).value_or(-std::numeric_limits<double>::infinity()); };
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = value(d);
    }
  }
  return std::max({top, fc, fd});
}

FreezingResult detect_freezing(const ShiftModel& model, const NonlinearEnergy& energy1, double beta_max,
                               double epsilon_margin) {
  if (model.dim() != 1 || model.rotation().effective_dim != 1)
    throw Error(ErrorKind::DimensionNotOne, "freezing detection needs a single potential");
  if (energy1.kind() != EnergyKind::power && energy1.kind() != EnergyKind::linear)
    throw Error(ErrorKind::InvalidInput, "freezing detection needs a power or linear energy");
  if (!(beta_max > 0.0) || !std::isfinite(beta_max)) throw Error(ErrorKind::InvalidInput, "beta_max must be positive");
  const RotationSet& rot = model.rotation();
  const double lo = std::min(rot.extreme_points.front()(0), rot.extreme_points.back()(0));
  const double hi = std::max(rot.extreme_points.front()(0), rot.extreme_points.back()(0));
  if (std::abs(hi) > 1e-12 || !(lo < 0.0))
    throw Error(ErrorKind::InvalidInput, "freezing detection needs a rotation set of the form [r, 0]");

  const NonlinearEnergy f1 = energy1.with_beta(1.0);
  const Vec ground = Vec::Zero(1);
  const double h0 = entropy_at(model, ground).h;
  const double f0 = f1.potential_value(ground);
  Vec warm = Vec::Zero(1);
  auto entropy_drop = [&](double z) -> std::optional<double> {
    const Vec zv = Vec::Constant(1, z);
    const EntropyEvaluation e = entropy_at(model, zv, {}, &warm);
    if (e.status != EntropyStatus::interior) return std::nullopt;
    warm = e.dual_y;
    return e.h - h0;
  };
  auto energy_drop = [&](double z) { return f0 - f1.potential_value(Vec::Constant(1, z)); };

  FreezingResult out;
  out.beta_0 = freezing_threshold(entropy_drop, energy_drop, lo);
  out.ground_value = ground;

  FreezingVerdict& v = out.verdict;
  v.epsilon_margin = epsilon_margin;
  v.expected_slope = f0;
  const double above = out.beta_0 * (1.0 + epsilon_margin);
  const double below = out.beta_0 * (1.0 - epsilon_margin);
  const int points = 9;
  if (beta_max > above)
    for (int i = 0; i < points; ++i) v.betas_above.push_back(above + (beta_max - above) * i / (points - 1));
  for (int i = 1; i <= points - 1; ++i) v.betas_below.push_back(below * i / (points - 1));

  v.pressures_above.resize(v.betas_above.size());
  std::vector<char> frozen(v.betas_above.size(), 0);
  parallel_for(v.betas_above.size(), [&](std::size_t i) {
    const EquilibriumReport r = nl_pressure(model, energy1.with_beta(v.betas_above[i]));
    v.pressures_above[i] = r.pressure;
    frozen[i] = r.multiplicity == 1 && (r.values.front().z - ground).norm() < 1e-6;
  });
  v.pressures_below.resize(v.betas_below.size());
  std::vector<char> interior(v.betas_below.size(), 0);
  parallel_for(v.betas_below.size(), [&](std::size_t i) {
    const EquilibriumReport r = nl_pressure(model, energy1.with_beta(v.betas_below[i]));
    v.pressures_below[i] = r.pressure;
    bool ok = true;
    for (const auto& val : r.values) ok = ok && !val.on_boundary && (val.z - ground).norm() > 1e-6;
    interior[i] = ok;
  });
  v.frozen_above = !frozen.empty() && std::all_of(frozen.begin(), frozen.end(), [](char c) { return c != 0; });
  v.interior_below = std::all_of(interior.begin(), interior.end(), [](char c) { return c != 0; });

  if (v.betas_above.size() >= 2) {
    const std::size_t m = v.betas_above.size();
    const double mb = std::accumulate(v.betas_above.begin(), v.betas_above.end(), 0.0) / m;
    const double mp = std::accumulate(v.pressures_above.begin(), v.pressures_above.end(), 0.0) / m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sxy += (v.betas_above[i] - mb) * (v.pressures_above[i] - mp);
      sxx += (v.betas_above[i] - mb) * (v.betas_above[i] - mb);
    }
    v.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    for (std::size_t i = 0; i < m; ++i)
      v.affine_residual =
          std::max(v.affine_residual, std::abs(v.pressures_above[i] - (mp + v.slope * (v.betas_above[i] - mb))));
  }
  return out;
}

}  // namespace thermoform
