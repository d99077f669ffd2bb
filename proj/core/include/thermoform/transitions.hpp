#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermoform/energy.hpp"
#include "thermoform/nonlinear_pressure.hpp"
#include "thermoform/shift_model.hpp"

namespace thermoform {

enum class TransitionKind { count_change, kink_first_order, metastable_onset, freezing_onset };
std::string_view to_string(TransitionKind kind) noexcept;

struct ScanOptions {
  double beta_tol = 1e-8;
  double kink_threshold = 1e-6;
  bool refine = true;
  int n_scan = 20001;
  NlOptions nl;
};

// A tracked local maximum of g at one beta. Branch ids are stable along the
// continuation.
struct BranchPoint {
  int branch = 0;
  Vec z;
  double g = 0.0;
  bool is_global = false;
  bool on_boundary = false;
};

struct TransitionEvidence {
  int left_count = 0;
  int right_count = 0;
  double derivative_jump = 0.0;       // |dPi/dbeta| jump at the refined beta
  double second_difference = 0.0;     // |Pi[i+1] - 2 Pi[i] + Pi[i-1]| / dbeta at the grid cell
  double noise_floor = 0.0;           // 10 x local median of the same quantity
  std::vector<int> branches;          // branch ids involved
  double grid_left = 0.0;
  double grid_right = 0.0;
};

struct TransitionEvent {
  TransitionKind kind = TransitionKind::count_change;
  double beta = 0.0;
  TransitionEvidence evidence;
};

struct BetaScan {
  std::vector<double> betas;
  std::vector<double> pressures;
  std::vector<int> counts;
  std::vector<std::vector<BranchPoint>> value_branches;
  std::vector<int> global_branch;
  std::vector<TransitionEvent> events;  // ascending beta
  int branch_count = 0;
};

// Runs nl_pressure (and for d = 1 critical_points_1d) along energy1.with_beta
// over an ascending grid. Throws GridTooCoarse, InvalidInput.
BetaScan scan(const ShiftModel& model, const NonlinearEnergy& energy1, const std::vector<double>& betas,
              const ScanOptions& options = {});

// Ascending grid lo, lo + step, ..., up to hi inclusive (within step/1e6).
std::vector<double> beta_grid(double lo, double hi, double step);

// 2 (n-1)/(n-2) log(n-1).
double potts_critical_beta(int n_letters);

// Largest root s in (0, 1] of s = (1 - e^{-beta s}) / (1 + (n-1) e^{-beta s}).
// Throws BelowCritical for beta < beta_c, InvalidInput for n < 3.
double potts_magnetization(int n_letters, double beta);

// Equilibrium value (z_1, ..., z_n) with the magnetized letter first.
Vec potts_value(int n_letters, double s);

struct FreezingVerdict {
  double epsilon_margin = 0.01;
  std::vector<double> betas_above;
  std::vector<double> pressures_above;
  std::vector<double> betas_below;
  std::vector<double> pressures_below;
  bool frozen_above = false;    // V = {ground value} at every beta above
  bool interior_below = false;  // maximizer interior at every beta below
  double slope = 0.0;           // least-squares slope of Pi above
  double expected_slope = 0.0;  // F_1(ground value)
  double affine_residual = 0.0; // max |residual| of the line fit
};

struct FreezingResult {
  double beta_0 = 0.0;
  Vec ground_value;
  FreezingVerdict verdict;
};

// sup over z in (r, 0) of (h(z) - h(0)) / (F_1(0) - F_1(z)). entropy_drop(z)
// returns h(z) - h(0) or nullopt where z is not resolvable (near the boundary).
// Throws NotFreezingShape when the supremum escapes towards z = 0.
double freezing_threshold(const std::function<std::optional<double>(double)>& entropy_drop,
                          const std::function<double(double)>& energy_drop, double r);

// d = 1 model with rotation set [r, 0] and a power or linear energy1.
FreezingResult detect_freezing(const ShiftModel& model, const NonlinearEnergy& energy1, double beta_max,
                               double epsilon_margin = 0.01);

}  // namespace thermoform
