#pragma once

#include <vector>

#include "thermoform/energy.hpp"
#include "thermoform/nonlinear_pressure.hpp"
#include "thermoform/shift_model.hpp"

namespace thermoform {

struct GibbsOptions {
  double max_classes = 1e8;   // full-shift compositions
  double max_dp_cells = 2e8;  // (position, count vector, last letter) states
};

// Letter-count class of admissible n-words.
struct CountClass {
  std::vector<int> counts;
  double log_multiplicity = 0.0;
  Vec mean_potential;
};

struct ZetaResult {
  int n = 0;
  double log_zeta = 0.0;
  std::vector<CountClass> classes;
  std::vector<double> log_weights;  // log_multiplicity + n F(mean_potential)
};

// Exact nonlinear partition function at word resolution. Potential-form
// energies only. Throws BudgetExceeded, InadmissibleEnergy.
ZetaResult zeta_exact(const ShiftModel& model, const NonlinearEnergy& energy, int n, const GibbsOptions& options = {});

struct ZetaRow {
  int n = 0;
  double log_zeta_over_n = 0.0;
  double gap = 0.0;
  Vec ensemble_mean;
  double dist_to_hull_V = 0.0;
};

struct GibbsEnsemble {
  ZetaRow row;
  std::vector<CountClass> classes;
  std::vector<double> probabilities;
};

GibbsEnsemble gibbs_ensemble(const ShiftModel& model, const NonlinearEnergy& energy, int n,
                             const EquilibriumReport& report, const GibbsOptions& options = {});

struct ConvergenceTable {
  std::vector<ZetaRow> rows;  // ascending n
  // |gap| is nonincreasing over the second half of the rows, up to 1e-3.
  bool monotone = true;
};

ConvergenceTable convergence_table(const ShiftModel& model, const NonlinearEnergy& energy, std::vector<int> ns,
                                   const GibbsOptions& options = {});
ConvergenceTable convergence_table(const ShiftModel& model, const NonlinearEnergy& energy, std::vector<int> ns,
                                   const EquilibriumReport& report, const GibbsOptions& options = {});

}  // namespace thermoform
