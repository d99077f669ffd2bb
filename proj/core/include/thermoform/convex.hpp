#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thermoform/shift_model.hpp"

namespace thermoform {

enum class EntropyStatus { interior, near_boundary, outside };

std::string_view to_string(EntropyStatus status) noexcept;

struct EntropyOptions {
  double y_max = 50.0;
  double tolerance = 1e-10;  // max-norm residual |z(y) - z|
  double hull_slack = 1e-9;
  double fd_step = 1e-4;     // central differences of z(y) for the Hessian
  int max_iterations = 400;
};

struct EntropyEvaluation {
  Vec z;
  double h = -std::numeric_limits<double>::infinity();
  Vec dual_y;  // NaN when outside
  Vec grad_h;  // -dual_y
  EntropyStatus status = EntropyStatus::outside;
  double residual = 0.0;
  int iterations = 0;
};

// h(z) = inf_y P(y) - y.z by damped Newton. For models whose rotation set
// is lower dimensional the minimization runs on the reduced model and the
// dual is embedded with zeros in the dropped coordinates. warm_start, when
// given, replaces y = 0 as the initial point. Throws NoConvergence.
EntropyEvaluation entropy_at(const ShiftModel& model, const Vec& z, const EntropyOptions& options = {},
                             const Vec* warm_start = nullptr);

struct DiagramGrid {
  int points_per_axis = 101;
  // Per-axis [lo, hi] in the (reduced) coordinates; empty means the hull's
  // bounding box shrunk by the edge margin.
  std::vector<std::pair<double, double>> ranges;
  double edge_margin = 1e-4;  // relative to the hull diameter
};

struct DiagramRow {
  Vec z;
  double h = 0.0;
  Vec grad_h;
  EntropyStatus status = EntropyStatus::interior;
};

struct DiagramTable {
  std::vector<DiagramRow> rows;  // lexicographic in z
  DiagramGrid grid;
  bool reduced = false;  // z is in the kept coordinates of the reduction
  std::vector<int> kept;
  std::string grid_spec;
};

// Entropy over a regular grid intersected with the shrunk rotation set.
// Models are reduced first; throws DimensionTooHigh when d' > 2.
DiagramTable diagram(const ShiftModel& model, const DiagramGrid& grid = {}, const EntropyOptions& options = {});

}  // namespace thermoform
