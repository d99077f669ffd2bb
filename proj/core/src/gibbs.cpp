#include "thermoform/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>

#include "thermoform/error.hpp"

namespace thermoform {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_binomial(double n, double r) { return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0); }

Vec mean_of(const ShiftModel& model, const std::vector<int>& counts, int n) {
  Vec m = Vec::Zero(model.dim());
  for (std::size_t a = 0; a < counts.size(); ++a)
    if (counts[a]) m += counts[a] * model.potentials().row(static_cast<Eigen::Index>(a)).transpose();
  return m / static_cast<double>(n);
}

std::vector<CountClass> full_shift_classes(const ShiftModel& model, int n, const GibbsOptions& options) {
  const int k = model.alphabet_size();
  const double classes = std::exp(log_binomial(n + k - 1, k - 1));
  if (classes > options.max_classes)
    throw Error(ErrorKind::BudgetExceeded, "about " + std::to_string(classes) + " count classes exceed the budget");
  std::vector<CountClass> out;
  out.reserve(static_cast<std::size_t>(classes + 0.5));
  const double log_nfact = std::lgamma(n + 1.0);
  std::vector<int> counts(k, 0);
  // Compositions of n into k parts in lexicographic order.
  auto recurse = [&](auto&& self, int pos, int left) -> void {
    if (pos == k - 1) {
      counts[pos] = left;
      double lm = log_nfact;
      for (int c : counts) lm -= std::lgamma(c + 1.0);
      out.push_back({counts, lm, mean_of(model, counts, n)});
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  recurse(recurse, 0, n);
  return out;
}

std::vector<CountClass> sft_classes(const ShiftModel& model, int n, const GibbsOptions& options) {
  const int k = model.alphabet_size();
  const double cells = k * std::exp(log_binomial(n + k, k));
  if (cells > options.max_dp_cells)
    throw Error(ErrorKind::BudgetExceeded, "about " + std::to_string(cells) + " DP cells exceed the budget");
  const double base = n + 1.0;
  if (std::pow(base, k) > 9e18) throw Error(ErrorKind::BudgetExceeded, "count vectors do not fit the DP key");
  const auto b = static_cast<std::uint64_t>(base);
  std::vector<std::uint64_t> unit(k, 1);
  for (int a = 1; a < k; ++a) unit[a] = unit[a - 1] * b;

  using Layer = std::unordered_map<std::uint64_t, std::vector<double>>;
  Layer cur;
  for (int a = 0; a < k; ++a) {
    auto& cell = cur[unit[a]];
    cell.assign(k, kNegInf);
    cell[a] = 0.0;
  }
  const Mat& adj = model.adjacency();
  for (int pos = 1; pos < n; ++pos) {
    Layer next;
    next.reserve(cur.size() * 2);
    for (const auto& [key, cell] : cur) {
      for (int a = 0; a < k; ++a) {
        if (cell[a] == kNegInf) continue;
        for (int c = 0; c < k; ++c) {
          if (adj(a, c) == 0.0) continue;
          auto& target = next[key + unit[c]];
          if (target.empty()) target.assign(k, kNegInf);
          target[c] = log_add(target[c], cell[a]);
        }
      }
    }
    cur.swap(next);
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(cur.size());
  for (const auto& entry : cur) keys.push_back(entry.first);
  // Lexicographic in the counts: letter 0 is the least significant digit.
  std::vector<std::pair<std::vector<int>, std::uint64_t>> decoded;
  for (std::uint64_t key : keys) {
    std::vector<int> counts(k);
    std::uint64_t rest = key;
    for (int a = 0; a < k; ++a) {
      counts[a] = static_cast<int>(rest % b);
      rest /= b;
    }
    decoded.emplace_back(std::move(counts), key);
  }
  std::sort(decoded.begin(), decoded.end());
  std::vector<CountClass> out;
  out.reserve(decoded.size());
  for (auto& [counts, key] : decoded) {
    double lm = kNegInf;
    for (double v : cur[key]) lm = log_add(lm, v);
    out.push_back({counts, lm, mean_of(model, counts, n)});
  }
  return out;
}

}  // namespace

ZetaResult zeta_exact(const ShiftModel& model, const NonlinearEnergy& energy, int n, const GibbsOptions& options) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "word length must be at least 1");
  if (!energy.potential_form())
    throw Error(ErrorKind::InadmissibleEnergy, "partition functions need an energy of potential form F(z)");
  energy.check_admissible(model);

  ZetaResult out;
  out.n = n;
  out.classes = model.is_full_shift() ? full_shift_classes(model, n, options) : sft_classes(model, n, options);
  out.log_weights.resize(out.classes.size());
  double top = kNegInf;
  for (std::size_t i = 0; i < out.classes.size(); ++i) {
    out.log_weights[i] = out.classes[i].log_multiplicity + n * energy.potential_value(out.classes[i].mean_potential);
    top = std::max(top, out.log_weights[i]);
  }
  double sum = 0.0;
  for (double w : out.log_weights) sum += std::exp(w - top);
  out.log_zeta = top + std::log(sum);
  return out;
}

GibbsEnsemble gibbs_ensemble(const ShiftModel& model, const NonlinearEnergy& energy, int n,
                             const EquilibriumReport& report, const GibbsOptions& options) {
  ZetaResult zeta = zeta_exact(model, energy, n, options);
  GibbsEnsemble out;
  out.probabilities.resize(zeta.classes.size());
  Vec mean = Vec::Zero(model.dim());
  for (std::size_t i = 0; i < zeta.classes.size(); ++i) {
    out.probabilities[i] = std::exp(zeta.log_weights[i] - zeta.log_zeta);
    mean += out.probabilities[i] * zeta.classes[i].mean_potential;
  }
  out.row.n = n;
  out.row.log_zeta_over_n = zeta.log_zeta / n;
  out.row.gap = out.row.log_zeta_over_n - report.pressure;
  out.row.ensemble_mean = mean;
  PointSet values;
  for (const auto& v : report.values) values.push_back(v.z);
  out.row.dist_to_hull_V = values.empty() ? std::numeric_limits<double>::infinity() : hull_distance(values, mean);
  out.classes = std::move(zeta.classes);
  return out;
}

ConvergenceTable convergence_table(const ShiftModel& model, const NonlinearEnergy& energy, std::vector<int> ns,
                                   const EquilibriumReport& report, const GibbsOptions& options) {
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  ConvergenceTable table;
  for (int n : ns) table.rows.push_back(gibbs_ensemble(model, energy, n, report, options).row);
  for (std::size_t i = table.rows.size() / 2 + 1; i < table.rows.size(); ++i)
    if (std::abs(table.rows[i].gap) > std::abs(table.rows[i - 1].gap) + 1e-3) table.monotone = false;
  return table;
}

ConvergenceTable convergence_table(const ShiftModel& model, const NonlinearEnergy& energy, std::vector<int> ns,
                                   const GibbsOptions& options) {
  return convergence_table(model, energy, std::move(ns), nl_pressure(model, energy), options);
}

}  // namespace thermoform
