#pragma once

#include <string_view>
#include <vector>

#include "thermoform/convex.hpp"
#include "thermoform/energy.hpp"
#include "thermoform/shift_model.hpp"

namespace thermoform {

struct NlOptions {
  int starts_per_axis = 32;
  int max_starts = 4096;
  double tol_value = 1e-9;
  double tol_cluster = 1e-5;
  double y_ascent_max = 1e3;
  int max_ascent_iterations = 200;
  int continuum_limit = 64;
};

struct EquilibriumValue {
  Vec z;             // potential averages
  Vec z_reduced;     // kept coordinates
  Vec dual;          // dual parameter on the original model
  Vec dual_reduced;
  double g = 0.0;    // G(h(z); z)
  bool on_boundary = false;
};

// Strict or degenerate local maximum of g found by the multi-start ascent.
struct LocalMaximum {
  Vec z;
  Vec z_reduced;
  Vec dual_reduced;
  double g = 0.0;
  bool degenerate = false;
};

struct EquilibriumReport {
  double pressure = 0.0;
  std::vector<EquilibriumValue> values;  // lexicographic in z
  std::vector<Vec> duals;
  std::vector<PerronData> measures;
  int multiplicity = 0;
  std::vector<Vec> boundary_values;
  std::vector<LocalMaximum> local_maxima;  // lexicographic in z
  bool continuum_suspected = false;
};

// Maximizes g(z) = G(h(z); z) over the rotation set. Models are reduced first
// and the energy is composed with the lift. Throws InadmissibleEnergy,
// EmptyInterior, BadDimensions.
EquilibriumReport nl_pressure(const ShiftModel& model, const NonlinearEnergy& energy, const NlOptions& options = {});

std::vector<PerronData> equilibrium_measures(const ShiftModel& model, const EquilibriumReport& report);

enum class CriticalKind { local_max, local_min, saddle };
std::string_view to_string(CriticalKind kind) noexcept;

struct CriticalPoint {
  double z_reduced = 0.0;
  Vec z;
  double g = 0.0;
  double dual_reduced = 0.0;
  CriticalKind kind = CriticalKind::saddle;
};

// Sign changes of g' on a dense grid of the (one-dimensional, after
// reduction) rotation set, refined by bisection. Throws DimensionNotOne.
std::vector<CriticalPoint> critical_points_1d(const ShiftModel& model, const NonlinearEnergy& energy,
                                              int n_scan = 20001);

}  // namespace thermoform
