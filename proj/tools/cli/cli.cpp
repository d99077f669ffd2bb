#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "thermoform/convex.hpp"
#include "thermoform/error.hpp"
#include "thermoform/gibbs.hpp"
#include "thermoform/io.hpp"
#include "thermoform/nonlinear_pressure.hpp"
#include "thermoform/shift_model.hpp"
#include "thermoform/transitions.hpp"

namespace thermoform::cli {

namespace {

constexpr int kInputError = 2;

std::vector<double> numbers(const std::string& text, char sep, std::size_t expected, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, what + ": '" + item + "' is not a number");
    }
  }
  if (expected && out.size() != expected)
    throw Error(ErrorKind::InvalidInput, what + " needs " + std::to_string(expected) + " ':'-separated numbers");
  return out;
}

NlOptions nl_options(const RunConfig& c) {
  NlOptions o;
  o.starts_per_axis = c.starts_per_axis;
  o.tol_value = c.tol_value;
  o.tol_cluster = c.tol_cluster;
  return o;
}

GibbsOptions gibbs_options(const RunConfig& c) {
  GibbsOptions o;
  o.max_classes = c.max_classes;
  o.max_dp_cells = c.max_dp_cells;
  return o;
}

void check_knobs(const RunConfig& c) {
  if (c.grid < 2) throw Error(ErrorKind::InvalidInput, "--grid must be at least 2");
  if (c.starts_per_axis < 1) throw Error(ErrorKind::InvalidInput, "--starts-per-axis must be positive");
  if (c.n_scan < 3) throw Error(ErrorKind::InvalidInput, "--n-scan must be at least 3");
  if (!(c.tol_value > 0) || !(c.tol_cluster > 0) || !(c.beta_tol > 0) || !(c.max_classes > 0) ||
      !(c.max_dp_cells > 0))
    throw Error(ErrorKind::InvalidInput, "tolerances and budgets must be positive");
  for (int n : c.ns)
    if (n < 1) throw Error(ErrorKind::InvalidInput, "--n values must be positive");
  if (c.format != "" && c.format != "csv" && c.format != "text")
    throw Error(ErrorKind::InvalidInput, "--format must be csv or text");
}

NonlinearEnergy energy_for(const RunConfig& c, const ShiftModel& model) {
  NonlinearEnergy e = load_energy(c.energy, model.dim());
  if (c.beta) e = e.with_beta(*c.beta);
  return e;
}

void pressure_cmd(const RunConfig& c, const ShiftModel& model, std::ostream& os, bool csv) {
  Vec y = Vec::Zero(model.dim());
  if (!c.y.empty()) {
    if (static_cast<int>(c.y.size()) != model.dim())
      throw Error(ErrorKind::BadDimensions, "--y needs " + std::to_string(model.dim()) + " values");
    y = Eigen::Map<const Vec>(c.y.data(), model.dim());
  }
  const PerronData d = linear_pressure(model, y);
  if (!csv) {
    write_perron_text(os, d);
    return;
  }
  for (int i = 0; i < model.dim(); ++i) os << "y_" << i + 1 << ",";
  os << "pressure,entropy";
  for (int i = 0; i < model.dim(); ++i) os << ",z_" << i + 1;
  os << "\n";
  for (int i = 0; i < model.dim(); ++i) os << format_number(y(i)) << ",";
  os << format_number(d.pressure) << "," << format_number(d.entropy);
  for (int i = 0; i < model.dim(); ++i) os << "," << format_number(d.z(i));
  os << "\n";
}

void diagram_cmd(const RunConfig& c, const ShiftModel& model, std::ostream& os, bool csv) {
  DiagramGrid grid;
  grid.points_per_axis = c.grid;
  for (const auto& r : c.ranges) {
    const auto v = numbers(r, ':', 2, "--range");
    grid.ranges.emplace_back(v[0], v[1]);
  }
  const DiagramTable t = diagram(model, grid);
  if (csv) write_diagram_csv(os, t);
  else write_diagram_text(os, t);
}

void equilibria_cmd(const RunConfig& c, const ShiftModel& model, std::ostream& os, bool csv) {
  const NonlinearEnergy e = energy_for(c, model);
  const EquilibriumReport r = nl_pressure(model, e, nl_options(c));
  if (!csv) {
    write_report_text(os, r, equilibrium_measures(model, r));
    return;
  }
  const int d = model.dim();
  for (int i = 0; i < d; ++i) os << "z_" << i + 1 << ",";
  for (int i = 0; i < d; ++i) os << "y_" << i + 1 << ",";
  os << "g,pressure,on_boundary\n";
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    for (int i = 0; i < d; ++i) os << format_number(r.values[k].z(i)) << ",";
    for (int i = 0; i < d; ++i) os << format_number(r.duals[k](i)) << ",";
    os << format_number(r.values[k].g) << "," << format_number(r.pressure) << ","
       << (r.values[k].on_boundary ? "true" : "false") << "\n";
  }
}

void gibbs_cmd(const RunConfig& c, const ShiftModel& model, std::ostream& os, bool csv) {
  const NonlinearEnergy e = energy_for(c, model);
  const EquilibriumReport r = nl_pressure(model, e, nl_options(c));
  const ConvergenceTable t = convergence_table(model, e, c.ns, r, gibbs_options(c));
  if (csv) write_convergence_csv(os, t);
  else write_convergence_text(os, t);
}

void scan_cmd(const RunConfig& c, const ShiftModel& model, std::ostream& os, bool csv, std::ostream& err) {
  if (c.beta_range.empty()) throw Error(ErrorKind::InvalidInput, "scan needs --beta-range lo:hi:step");
  const auto v = numbers(c.beta_range, ':', 3, "--beta-range");
  ScanOptions o;
  o.beta_tol = c.beta_tol;
  o.n_scan = c.n_scan;
  o.nl = nl_options(c);
  const NonlinearEnergy e = load_energy(c.energy, model.dim());
  const BetaScan s = scan(model, e, beta_grid(v[0], v[1], v[2]), o);
  if (!csv) {
    write_scan_csv(os, s);
    write_events_text(os, s.events);
    return;
  }
  write_scan_csv(os, s);
  if (c.events.empty() || c.events == "-") {
    write_events_text(err, s.events);
  } else {
    std::ofstream f(c.events);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + c.events);
    write_events_text(f, s.events);
  }
}

void freezing_cmd(const RunConfig& c, const ShiftModel& model, std::ostream& os) {
  const NonlinearEnergy e = load_energy(c.energy, model.dim());
  write_freezing_text(os, detect_freezing(model, e, c.beta_max));
}

void potts_cmd(const RunConfig& c, std::ostream& os, bool csv) {
  const double beta_c = potts_critical_beta(c.n_letters);
  std::optional<double> s;
  if (c.beta) s = potts_magnetization(c.n_letters, *c.beta);
  if (csv) {
    os << "n,beta_c,beta,s\n" << c.n_letters << "," << format_number(beta_c) << ",";
    if (c.beta) os << format_number(*c.beta) << "," << format_number(*s);
    else os << ",";
    os << "\n";
    return;
  }
  os << "n: " << c.n_letters << "\n";
  os << "beta_c: " << format_number(beta_c) << "\n";
  if (c.beta) {
    const Vec z = potts_value(c.n_letters, *s);
    os << "beta: " << format_number(*c.beta) << "\n";
    os << "magnetization: " << format_number(*s) << "\n";
    os << "value: [";
    for (Eigen::Index i = 0; i < z.size(); ++i) os << (i ? ", " : "") << format_number(z(i));
    os << "]\n";
  }
}

int dispatch(const RunConfig& c, std::ostream& os, std::ostream& err) {
  check_knobs(c);
  const bool table = c.command == "entropy-diagram" || c.command == "gibbs" || c.command == "scan";
  const bool csv = c.format.empty() ? table : c.format == "csv";
  if (c.command == "potts") {
    potts_cmd(c, os, csv);
    return 0;
  }
  const ShiftModel model = load_model(c.model);
  if (!c.dump_model.empty()) {
    std::ofstream f(c.dump_model);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + c.dump_model);
    f << model_to_json(model.to_raw());
  }
  if (c.command == "pressure") pressure_cmd(c, model, os, csv);
  else if (c.command == "entropy-diagram") diagram_cmd(c, model, os, csv);
  else if (c.command == "equilibria") equilibria_cmd(c, model, os, csv);
  else if (c.command == "gibbs") gibbs_cmd(c, model, os, csv);
  else if (c.command == "scan") scan_cmd(c, model, os, csv, err);
  else if (c.command == "freezing") freezing_cmd(c, model, os);
  else throw Error(ErrorKind::InvalidInput, "unknown command '" + c.command + "'");
  return 0;
}

}  // namespace

ParseResult parse_arguments(int argc, const char* const* argv) {
  ParseResult result;
  RunConfig& c = result.config;
  CLI::App app{"Nonlinear thermodynamic formalism on subshifts of finite type", "thermoform"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.add_option("command", c.command, "Operation to run")
      ->required()
      ->check(CLI::IsMember({"pressure", "entropy-diagram", "equilibria", "gibbs", "scan", "freezing", "potts"}));
  app.add_option("--model", c.model, "builtin:<id> or model file")->capture_default_str();
  app.add_option("--energy", c.energy, "Inline energy spec or energy file")->capture_default_str();
  app.add_option("-o,--output", c.output, "Output path, - for stdout")->capture_default_str();
  app.add_option("--format", c.format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  app.add_option("--events", c.events, "Where scan events go in csv mode (default stderr)");
  app.add_option("--dump-model", c.dump_model, "Write the model as a JSON model file");
  app.add_option("--grid", c.grid, "Diagram points per axis")->capture_default_str();
  app.add_option("--range", c.ranges, "Diagram axis range lo:hi, once per axis");
  app.add_option("--beta-range", c.beta_range, "Scan grid lo:hi:step");
  app.add_option("--n", c.ns, "Word lengths for gibbs")->delimiter(',')->capture_default_str();
  app.add_option("--y", c.y, "Linear pressure argument")->delimiter(',');
  app.add_option("--beta", c.beta, "Inverse temperature override");
  app.add_option("--beta-max", c.beta_max, "Upper end of the freezing verdict grid")->capture_default_str();
  app.add_option("--n-letters", c.n_letters, "Potts letter count")->capture_default_str();
  app.add_option("--starts-per-axis", c.starts_per_axis, "Multi-start grid per axis")->capture_default_str();
  app.add_option("--tol-value", c.tol_value, "Tie band for pressure values")->capture_default_str();
  app.add_option("--tol-cluster", c.tol_cluster, "Clustering distance for values")->capture_default_str();
  app.add_option("--n-scan", c.n_scan, "Critical-point scan resolution")->capture_default_str();
  app.add_option("--beta-tol", c.beta_tol, "Transition refinement tolerance")->capture_default_str();
  app.add_option("--max-classes", c.max_classes, "Full-shift count-class budget")->capture_default_str();
  app.add_option("--max-dp-cells", c.max_dp_cells, "Subshift DP budget")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    result.exit_code = code == 0 ? 0 : kInputError;
  }
  return result;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.output.empty() || config.output == "-") return dispatch(config, out, err);
    std::ostringstream buffer;
    const int code = dispatch(config, buffer, err);
    std::ofstream f(config.output, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + config.output);
    f << buffer.str();
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (family_of(e.kind())) {
      case ErrorFamily::Input: return 2;
      case ErrorFamily::Budget: return 3;
      case ErrorFamily::Numerical: return 4;
    }
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace thermoform::cli
