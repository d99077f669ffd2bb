// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "thermoform/convex.hpp"
#include "thermoform/error.hpp"
#include "thermoform/gibbs.hpp"
#include "thermoform/nonlinear_pressure.hpp"
#include "thermoform/shift_model.hpp"
#include "thermoform/transitions.hpp"

using namespace thermoform;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failed checks with a short reason each.
struct Check {
  std::vector<std::string> failures;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool passed() const { return failures.empty(); }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<const TransitionEvent*> of_kind(const BetaScan& s, TransitionKind k) {
  std::vector<const TransitionEvent*> out;
  for (const auto& e : s.events)
    if (e.kind == k) out.push_back(&e);
  return out;
}

void curie_weiss_baseline(Check& c) {
  const ShiftModel cw = builtin_model("curie_weiss");
  for (double beta : {0.0, 0.5, 1.0}) {
    const auto t0 = Clock::now();
    const EquilibriumReport r = nl_pressure(cw, NonlinearEnergy::quadratic(beta));
    const double dt = seconds_since(t0);
    const std::string at = " at beta=" + fmt(beta);
    c.require(std::abs(r.pressure - std::log(2.0)) < 1e-9, "pressure" + at + " = " + fmt(r.pressure));
    c.require(r.multiplicity == 1 && std::abs(r.values[0].z(0)) < 1e-6, "value set" + at);
    c.require(dt < 1.0, "runtime" + at + " " + fmt(dt) + " s");
    c.note << "beta=" << beta << " " << fmt(dt) << "s ";
  }
}

void curie_weiss_broken(Check& c) {
  const ShiftModel cw = builtin_model("curie_weiss");
  const auto t0 = Clock::now();
  const EquilibriumReport r = nl_pressure(cw, NonlinearEnergy::quadratic(2.0));
  const auto ms = equilibrium_measures(cw, r);
  const double dt = seconds_since(t0);
  const double zs = oracle::cw_magnetization(2.0);
  c.require(r.multiplicity == 2, "multiplicity " + std::to_string(r.multiplicity));
  if (r.multiplicity != 2) return;
  c.require(std::abs(r.values[0].z(0) + zs) < 1e-8 && std::abs(r.values[1].z(0) - zs) < 1e-8, "values vs oracle");
  c.require(std::abs(r.values[1].z(0) - std::tanh(2.0 * r.values[1].z(0))) < 1e-8, "fixed point residual");
  for (const auto& m : ms) c.require((m.transitions.row(0) - m.transitions.row(1)).norm() < 1e-8, "not Bernoulli");
  c.require(std::abs(ms[0].stationary(0) - ms[1].stationary(1)) < 1e-8 &&
                std::abs(ms[0].stationary(1) - ms[1].stationary(0)) < 1e-8,
            "measures are not letter-swapped");
  c.require(dt < 5.0, "runtime " + fmt(dt) + " s");
  c.note << "z*=" << fmt(r.values[1].z(0)) << " oracle=" << fmt(zs) << " " << fmt(dt) << "s";
}

void curie_weiss_transition(Check& c) {
  const BetaScan s =
      scan(builtin_model("curie_weiss"), NonlinearEnergy::quadratic(1.0), beta_grid(0.5, 1.5, 1e-3));
  const auto changes = of_kind(s, TransitionKind::count_change);
  c.require(changes.size() == 1, std::to_string(changes.size()) + " count_change events");
  if (changes.size() == 1) {
    c.require(std::abs(changes[0]->beta - 1.0) < 2e-3, "count_change at " + fmt(changes[0]->beta));
    c.note << "count_change at " << fmt(changes[0]->beta);
  }
}

void potts(Check& c) {
  for (int n : {3, 4, 5}) {
    const std::string tag = "n=" + std::to_string(n) + ": ";
    const ShiftModel model = builtin_model("potts:" + std::to_string(n));
    // Independent closed form 2(n-1)/(n-2) log(n-1), compared with the library value.
    const double bc = 2.0 * (n - 1) / (n - 2) * std::log(n - 1.0);
    c.require(std::abs(potts_critical_beta(n) - bc) < 1e-14, tag + "beta_c formula");

    const BetaScan s = scan(model, NonlinearEnergy::quadratic(1.0), beta_grid(bc - 0.1, bc + 0.1, 0.01));
    bool found = false;
    for (const auto& e : s.events)
      if ((e.kind == TransitionKind::count_change || e.kind == TransitionKind::kink_first_order) &&
          std::abs(e.beta - bc) < 1e-3)
        found = true;
    for (const auto* e : of_kind(s, TransitionKind::count_change))
      c.require(std::abs(e->beta - bc) < 1e-3, tag + "stray count_change at " + fmt(e->beta));
    c.require(found, tag + "no transition within 1e-3 of beta_c");

    for (double beta : {0.5 * bc, bc - 0.2}) {
      const double p = nl_pressure(model, NonlinearEnergy::quadratic(beta)).pressure;
      c.require(std::abs(p - (beta / (2.0 * n) + std::log(n))) < 1e-9, tag + "pressure at " + fmt(beta));
    }

    const EquilibriumReport at = nl_pressure(model, NonlinearEnergy::quadratic(bc));
    c.require(at.multiplicity == n + 1, tag + "multiplicity at beta_c " + std::to_string(at.multiplicity));

    const double beta = bc + 1.0;
    const double sm = potts_magnetization(n, beta);
    const double e = std::exp(-beta * sm);
    c.require(std::abs(sm - (1 - e) / (1 + (n - 1) * e)) < 1e-12, tag + "implicit equation");
    const EquilibriumReport above = nl_pressure(model, NonlinearEnergy::quadratic(beta));
    const Vec expected = potts_value(n, sm);
    bool matched = !above.values.empty();
    for (const auto& v : above.values) {
      Vec z = v.z;
      std::sort(z.data(), z.data() + n, std::greater<>());
      matched = matched && (z - expected).norm() < 1e-6;
    }
    c.require(matched, tag + "optimizer value vs magnetization");
    c.note << tag << "s=" << fmt(sm) << " ";
  }
}

void metastable(Check& c) {
  const ShiftModel asym = builtin_model("asymmetric_cw");
  const BetaScan s = scan(asym, NonlinearEnergy::quadratic(1.0), beta_grid(0.1, 0.5, 0.01));
  const auto onset = of_kind(s, TransitionKind::metastable_onset);
  const auto kink = of_kind(s, TransitionKind::kink_first_order);
  c.require(onset.size() == 1 && kink.size() == 1, "expected one onset and one kink");
  if (onset.size() != 1 || kink.size() != 1) return;
  const double b1 = onset[0]->beta, b0 = kink[0]->beta;
  c.require(b1 < b0, "beta_1 >= beta_0");

  // Branch-tracking oracle on the closed-form entropy: the positive branch
  // solves beta = -h'(z)/z; it is born at the minimum of that curve.
  auto dh = [](double z) { return (oracle::asym_entropy(z + 1e-6) - oracle::asym_entropy(z - 1e-6)) / 2e-6; };
  const double b1_oracle = -oracle::golden_max([&](double z) { return dh(z) / z; }, 0.05, 2.95);
  auto gap = [&](double beta) {
    auto g = [beta](double z) { return oracle::asym_entropy(z) + 0.5 * beta * z * z; };
    auto slope = [&](double z) { return (g(z + 1e-7) - g(z - 1e-7)) / 2e-7; };
    return g(oracle::bisect(slope, 1.0, 2.999999)) - g(oracle::bisect(slope, -1.99, 0.0));
  };
  const double b0_oracle = oracle::bisect(gap, 0.25, 0.35);
  c.require(std::abs(b1 - b1_oracle) < 1e-5, "beta_1 " + fmt(b1) + " vs oracle " + fmt(b1_oracle));
  c.require(std::abs(b0 - b0_oracle) < 1e-6, "beta_0 " + fmt(b0) + " vs oracle " + fmt(b0_oracle));

  for (double delta : {-0.01, 0.01}) {
    const EquilibriumReport r = nl_pressure(asym, NonlinearEnergy::quadratic(b0 + delta));
    const auto pts = critical_points_1d(asym, NonlinearEnergy::quadratic(b0 + delta));
    const auto maxima = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.kind == CriticalKind::local_max; });
    c.require(maxima == 2, "local maxima at beta_0" + fmt(delta));
    c.require(r.multiplicity == 1, "multiplicity near beta_0");
    if (r.multiplicity == 1)
      c.require(delta < 0 ? r.values[0].z(0) < 0 : r.values[0].z(0) > 0, "global branch near beta_0" + fmt(delta));
  }
  const EquilibriumReport cold = nl_pressure(asym, NonlinearEnergy::quadratic(20.0));
  c.require(cold.multiplicity == 1 && cold.values[0].z(0) > 2.9, "value at beta=20");
  c.note << "beta_1=" << fmt(b1) << " beta_0=" << fmt(b0) << " z(20)=" << fmt(cold.values[0].z(0));
}

void freezing(Check& c) {
  const ShiftModel fz = builtin_model("freezing");
  const NonlinearEnergy e1 = NonlinearEnergy::power(1.0, 0.5);
  const FreezingResult fr = detect_freezing(fz, e1, 3.0);
  const double b0 = fr.beta_0;
  c.require(std::isfinite(b0) && b0 > 0, "beta_0 not finite");
  c.require(fr.verdict.frozen_above && fr.verdict.interior_below, "library verdict");

  std::vector<double> betas, pressures;
  for (int i = 0; i <= 8; ++i) {
    const double beta = b0 * (1.1 + 0.9 * i / 8.0);
    const EquilibriumReport r = nl_pressure(fz, e1.with_beta(beta));
    c.require(std::abs(r.pressure) < 1e-9, "pressure at " + fmt(beta) + " = " + fmt(r.pressure));
    c.require(r.multiplicity == 1 && std::abs(r.values[0].z(0)) < 1e-9, "value set at " + fmt(beta));
    const auto ms = equilibrium_measures(fz, r);
    c.require(!ms.empty() && ms[0].stationary(0) > 1 - 1e-6, "ground state measure at " + fmt(beta));
    betas.push_back(beta);
    pressures.push_back(r.pressure);
  }
  for (double f : {0.9, 0.6, 0.3}) {
    const EquilibriumReport r = nl_pressure(fz, e1.with_beta(f * b0));
    c.require(r.pressure > 0, "pressure below beta_0");
    c.require(r.multiplicity == 1 && !r.values[0].on_boundary && r.values[0].z(0) < -1e-6, "interior maximizer");
  }
  // Least-squares line through the tail.
  const double n = static_cast<double>(betas.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    sx += betas[i], sy += pressures[i], sxx += betas[i] * betas[i], sxy += betas[i] * pressures[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double residual = 0;
  for (std::size_t i = 0; i < betas.size(); ++i)
    residual = std::max(residual, std::abs(pressures[i] - slope * betas[i] - icpt));
  c.require(residual < 1e-9, "affine residual " + fmt(residual));
  c.note << "beta_0=" << fmt(b0) << " residual=" << fmt(residual);
}

void variational(Check& c) {
  const ShiftModel cw = builtin_model("curie_weiss");
  const auto t0 = Clock::now();
  const ConvergenceTable t = convergence_table(cw, NonlinearEnergy::quadratic(0.5), {100, 500, 2000});
  const double dt = seconds_since(t0);
  const double pi = std::log(2.0);
  for (const auto& r : t.rows) {
    const double err = std::abs(r.log_zeta_over_n - pi);
    c.require(err <= 5.0 * std::log(r.n) / r.n, "n=" + std::to_string(r.n) + " gap " + fmt(err));
    c.note << "n=" << r.n << " gap=" << fmt(err) << " ";
  }
  c.require(t.rows.size() == 3, "row count");
  c.require(dt < 10.0, "runtime " + fmt(dt) + " s");
  c.note << fmt(dt) << "s";
}

void gibbs_accumulation(Check& c) {
  const ShiftModel cw = builtin_model("curie_weiss");
  const NonlinearEnergy q = NonlinearEnergy::quadratic(2.0);
  const EquilibriumReport r = nl_pressure(cw, q);
  const GibbsEnsemble g = gibbs_ensemble(cw, q, 2000, r);
  const double zs = oracle::cw_magnetization(2.0);
  double pos = 0, pos_w = 0, neg = 0, neg_w = 0, mean = 0;
  for (std::size_t i = 0; i < g.classes.size(); ++i) {
    const double z = g.classes[i].mean_potential(0), p = g.probabilities[i];
    mean += p * z;
    if (z > 0) pos += p * z, pos_w += p;
    if (z < 0) neg += p * z, neg_w += p;
  }
  c.require(std::abs(g.row.ensemble_mean(0)) < 1e-2, "ensemble mean " + fmt(g.row.ensemble_mean(0)));
  c.require(std::abs(mean - g.row.ensemble_mean(0)) < 1e-9, "reported mean disagrees with the classes");
  c.require(pos_w > 0 && std::abs(pos / pos_w - zs) < 5e-2, "positive conditional mean");
  c.require(neg_w > 0 && std::abs(neg / neg_w + zs) < 5e-2, "negative conditional mean");
  c.note << "mean=" << fmt(g.row.ensemble_mean(0)) << " +=" << fmt(pos / pos_w) << " -=" << fmt(neg / neg_w);
}

void duality_suite(Check& c) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> uy(-2.0, 2.0);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 3;
    const int d = 1 + (trial / 3) % 2;
    const bool golden = trial % 2 == 1;
    const ShiftModel m = validate_model(oracle::random_model(rng, k, d, golden));
    const std::string tag = "model " + std::to_string(trial) + ": ";
    const RotationSet rot = rotation_set(m);
    auto random_y = [&] { return Vec(Vec::NullaryExpr(d, [&](Eigen::Index) { return uy(rng); })); };
    for (int probe = 0; probe < 4; ++probe) {
      const Vec y = random_y();
      const PerronData p = linear_pressure(m, y);
      c.require(p.entropy >= -1e-12 && p.entropy <= std::log(k) + 1e-12, tag + "entropy range");
      c.require(std::abs(p.entropy + y.dot(p.z) - p.pressure) < 1e-9, tag + "variational identity");
      c.require(rot.contains(p.z, 1e-8), tag + "hull membership");
      c.require((p.stationary.transpose() * p.transitions - p.stationary.transpose()).norm() < 1e-10, tag + "pQ=p");
      for (int j = 0; j < d; ++j) {
        Vec hi = y, lo = y;
        hi(j) += 1e-5;
        lo(j) -= 1e-5;
        const double fd = (linear_pressure(m, hi).pressure - linear_pressure(m, lo).pressure) / 2e-5;
        c.require(std::abs(fd - p.z(j)) < 1e-5, tag + "gradient identity");
      }
      const Vec y2 = random_y();
      c.require(linear_pressure(m, 0.5 * (y + y2)).pressure <=
                    0.5 * (p.pressure + linear_pressure(m, y2).pressure) + 1e-10,
                tag + "convexity of P");

      // Inverse diffeomorphism, both directions.
      const EntropyEvaluation e = entropy_at(m, p.z);
      c.require(e.status == EntropyStatus::interior, tag + "interior status");
      if (e.status != EntropyStatus::interior) continue;
      c.require((linear_pressure(m, e.dual_y).z - p.z).norm() < 1e-6, tag + "z round trip");
      if (m.reduction().identity) c.require((e.dual_y - y).norm() < 1e-5, tag + "y round trip");
      c.require(std::abs(e.h - p.entropy) < 1e-8, tag + "entropy agreement");
      c.require((e.grad_h + e.dual_y).norm() == 0.0, tag + "grad_h = -dual_y");

      // Concavity along the segment to another interior point.
      const Vec z2 = linear_pressure(m, y2).z;
      const double h1 = e.h, h2 = entropy_at(m, z2).h;
      for (double t : {0.25, 0.5, 0.75})
        c.require(entropy_at(m, t * p.z + (1 - t) * z2).h >= t * h1 + (1 - t) * h2 - 1e-8, tag + "concavity");
      ++checked;
    }
    // Reduction round trip when the rotation set is degenerate.
    const PotentialReduction& red = m.reduction();
    if (!red.identity) {
      for (int probe = 0; probe < 100; ++probe) {
        const Vec yr = Vec::NullaryExpr(red.reduced_dim(), [&](Eigen::Index) { return uy(rng); });
        c.require(std::abs(linear_pressure(red.model, yr).pressure -
                           linear_pressure(m, red.embed_dual(yr)).pressure) < 1e-9,
                  tag + "reduction round trip");
      }
    }
  }
  c.note << checked << " interior probes on 50 models";
}

void brute_force(Check& c) {
  struct Case {
    const char* id;
    NonlinearEnergy energy;
    int max_n;
  };
  const std::vector<Case> cases = {
      {"curie_weiss", NonlinearEnergy::quadratic(2.0), 12},  {"asymmetric_cw", NonlinearEnergy::quadratic(0.3), 12},
      {"freezing", NonlinearEnergy::power(1.5, 0.5), 12},    {"potts:3", NonlinearEnergy::quadratic(3.0), 12},
      {"potts:4", NonlinearEnergy::quadratic(3.5), 12},      {"potts:5", NonlinearEnergy::quadratic(4.0), 12},
  };
  double worst = 0;
  for (const auto& cs : cases) {
    const ShiftModel m = builtin_model(cs.id);
    const auto f = [&](const Eigen::VectorXd& z) { return cs.energy.potential_value(z); };
    for (int n = 1; n <= cs.max_n; ++n) {
      // Large alphabets: every length up to 8, then the top length only.
      if (m.alphabet_size() >= 4 && n > 8 && n < cs.max_n) continue;
      const double err =
          std::abs(zeta_exact(m, cs.energy, n).log_zeta - oracle::brute_log_zeta(m.adjacency(), m.potentials(), n, f));
      worst = std::max(worst, err);
      c.require(err < 1e-10, std::string(cs.id) + " n=" + std::to_string(n) + " error " + fmt(err));
    }
  }
  struct Dense {
    const char* id;
    NonlinearEnergy energy;
    double (*h)(double);
    double lo, hi;
  };
  const std::vector<Dense> dense = {
      {"curie_weiss", NonlinearEnergy::quadratic(2.0), oracle::cw_entropy, -1, 1},
      {"asymmetric_cw", NonlinearEnergy::quadratic(0.3), oracle::asym_entropy, -2, 3},
      {"freezing", NonlinearEnergy::power(0.8, 0.5), oracle::freezing_entropy, -1, 0},
  };
  for (const auto& ds : dense) {
    const auto g = [&](double z) { return ds.h(z) + ds.energy.potential_value(Vec::Constant(1, z)); };
    const double grid = oracle::grid_max(g, ds.lo, ds.hi, 1'000'000);
    const double pi = nl_pressure(builtin_model(ds.id), ds.energy).pressure;
    c.require(std::abs(pi - grid) < 1e-6, std::string(ds.id) + " dense grid " + fmt(pi - grid));
  }
  c.note << "worst log error " << fmt(worst);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "Curie-Weiss baseline", curie_weiss_baseline},
      {2, "Curie-Weiss broken symmetry", curie_weiss_broken},
      {3, "Curie-Weiss transition location", curie_weiss_transition},
      {4, "Potts critical behaviour", potts},
      {5, "metastable model", metastable},
      {6, "freezing", freezing},
      {7, "variational principle", variational},
      {8, "Gibbs ensemble accumulation", gibbs_accumulation},
      {9, "duality property suite", duality_suite},
      {10, "brute-force oracle", brute_force},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = Clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    std::printf("[%s] criterion %d: %s (%.2fs) %s\n", c.passed() ? "PASS" : "FAIL", cr.id, cr.name, dt,
                c.note.str().c_str());
    for (std::size_t i = 0; i < c.failures.size() && i < 10; ++i) std::printf("    - %s\n", c.failures[i].c_str());
    if (c.failures.size() > 10) std::printf("    - ... %zu more\n", c.failures.size() - 10);
    std::fflush(stdout);
    if (!c.passed()) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
