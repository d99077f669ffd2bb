#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "thermoform/convex.hpp"
#include "thermoform/energy.hpp"
#include "thermoform/gibbs.hpp"
#include "thermoform/nonlinear_pressure.hpp"
#include "thermoform/shift_model.hpp"
#include "thermoform/transitions.hpp"

namespace thermoform {

// %.17g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double x);

// Model files: {"alphabet": [...], "adjacency": [[...]], "potentials": [[...]]}.
RawModel parse_model_json(std::string_view text);
std::string model_to_json(const RawModel& raw);
// "builtin:<id>" or a path to a model file.
ShiftModel load_model(const std::string& source);

// Inline forms: quadratic[:beta], power:beta:alpha, linear:beta[:c1,...,cd],
// polynomial:c0,c1,..., or a JSON object / path to a JSON energy file.
NonlinearEnergy parse_energy_json(std::string_view text, int model_dim);
NonlinearEnergy load_energy(const std::string& source, int model_dim);

void write_perron_text(std::ostream& os, const PerronData& data);
void write_report_text(std::ostream& os, const EquilibriumReport& report, const std::vector<PerronData>& measures);

void write_diagram_csv(std::ostream& os, const DiagramTable& table);
void write_diagram_text(std::ostream& os, const DiagramTable& table);

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);
void write_convergence_text(std::ostream& os, const ConvergenceTable& table);

// Branch coordinates of d > 1 models are joined with ';' inside one field.
void write_scan_csv(std::ostream& os, const BetaScan& scan);
void write_events_text(std::ostream& os, const std::vector<TransitionEvent>& events);

void write_freezing_text(std::ostream& os, const FreezingResult& result);

}  // namespace thermoform
