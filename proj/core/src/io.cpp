#include "thermoform/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "thermoform/error.hpp"

namespace thermoform {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string vec_text(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v(i));
  return s + "]";
}

std::string mat_text(const Mat& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += (i ? ", " : "") + vec_text(m.row(i).transpose());
  return s + "]";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed ") + what + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, "not a number: '" + item + "'");
    }
  }
  return out;
}

double parse_one(const std::string& s) {
  const auto v = parse_list(s);
  if (v.size() != 1) throw Error(ErrorKind::InvalidInput, "expected one number, got '" + s + "'");
  return v.front();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

RawModel parse_model_json(std::string_view text) {
  const json j = parse_json(text, "model file");
  RawModel raw;
  try {
    if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "model file must hold a JSON object");
    raw.adjacency = j.at("adjacency").get<std::vector<std::vector<double>>>();
    raw.potentials = j.at("potentials").get<std::vector<std::vector<double>>>();
    if (j.contains("alphabet")) {
      raw.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    } else {
      for (std::size_t a = 0; a < raw.adjacency.size(); ++a) raw.alphabet.push_back(std::to_string(a));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad model file: ") + e.what());
  }
  return raw;
}

std::string model_to_json(const RawModel& raw) {
  // Written by hand so numbers keep all 17 digits in a stable layout.
  std::string s = "{\n  \"alphabet\": [";
  for (std::size_t i = 0; i < raw.alphabet.size(); ++i) s += (i ? ", " : "") + json(raw.alphabet[i]).dump();
  s += "],\n  \"adjacency\": [";
  for (std::size_t i = 0; i < raw.adjacency.size(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < raw.adjacency[i].size(); ++j)
      s += (j ? ", " : "") + format_number(raw.adjacency[i][j]);
    s += "]";
  }
  s += "],\n  \"potentials\": [";
  for (std::size_t i = 0; i < raw.potentials.size(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < raw.potentials[i].size(); ++j)
      s += (j ? ", " : "") + format_number(raw.potentials[i][j]);
    s += "]";
  }
  return s + "]\n}\n";
}

ShiftModel load_model(const std::string& source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_model(std::string_view(source).substr(prefix.size()));
  if (!std::filesystem::exists(source))
    throw Error(ErrorKind::InvalidInput, "model '" + source + "' is neither builtin:<id> nor an existing file");
  return validate_model(parse_model_json(read_file(source)));
}

NonlinearEnergy parse_energy_json(std::string_view text, int model_dim) {
  const json j = parse_json(text, "energy file");
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const double beta = j.value("beta", 1.0);
    if (kind == "quadratic") return NonlinearEnergy::quadratic(beta);
    if (kind == "power") return NonlinearEnergy::power(beta, j.at("alpha").get<double>());
    if (kind == "linear") {
      Vec dir;
      if (j.contains("direction")) {
        const auto d = j.at("direction").get<std::vector<double>>();
        dir = Eigen::Map<const Vec>(d.data(), static_cast<Eigen::Index>(d.size()));
      }
      return NonlinearEnergy::linear(beta, dir);
    }
    if (kind == "polynomial") return NonlinearEnergy::polynomial(j.at("coeffs").get<std::vector<double>>(), beta);
    if (kind == "fully_nonlinear") {
      std::map<std::string, double> params;
      if (j.contains("params")) params = j.at("params").get<std::map<std::string, double>>();
      std::vector<std::pair<double, double>> domain;
      if (j.contains("domain"))
        for (const auto& box : j.at("domain")) domain.emplace_back(box.at(0).get<double>(), box.at(1).get<double>());
      return NonlinearEnergy::fully_nonlinear(j.at("expr").get<std::string>(), model_dim, params, domain);
    }
    throw Error(ErrorKind::InvalidInput, "unknown energy kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad energy file: ") + e.what());
  }
}

NonlinearEnergy load_energy(const std::string& source, int model_dim) {
  if (!source.empty() && source.front() == '{') return parse_energy_json(source, model_dim);
  const std::vector<std::string> parts = split(source, ':');
  const std::string& kind = parts.front();
  if (kind == "quadratic" && parts.size() <= 2)
    return NonlinearEnergy::quadratic(parts.size() == 2 ? parse_one(parts[1]) : 1.0);
  if (kind == "power" && parts.size() == 3) return NonlinearEnergy::power(parse_one(parts[1]), parse_one(parts[2]));
  if (kind == "linear" && parts.size() <= 3) {
    const double beta = parts.size() >= 2 ? parse_one(parts[1]) : 1.0;
    Vec dir;
    if (parts.size() == 3) {
      const auto d = parse_list(parts[2]);
      dir = Eigen::Map<const Vec>(d.data(), static_cast<Eigen::Index>(d.size()));
    }
    return NonlinearEnergy::linear(beta, dir);
  }
  if (kind == "polynomial" && parts.size() == 2) return NonlinearEnergy::polynomial(parse_list(parts[1]));
  if (std::filesystem::exists(source)) return parse_energy_json(read_file(source), model_dim);
  throw Error(ErrorKind::InvalidInput, "cannot read energy '" + source + "'");
}

void write_perron_text(std::ostream& os, const PerronData& d) {
  os << "y: " << vec_text(d.y) << "\n";
  os << "pressure: " << format_number(d.pressure) << "\n";
  os << "entropy: " << format_number(d.entropy) << "\n";
  os << "z: " << vec_text(d.z) << "\n";
  os << "stationary: " << vec_text(d.stationary) << "\n";
  os << "transitions: " << mat_text(d.transitions) << "\n";
}

void write_report_text(std::ostream& os, const EquilibriumReport& r, const std::vector<PerronData>& measures) {
  os << "pressure: " << format_number(r.pressure) << "\n";
  os << "multiplicity: " << r.multiplicity << "\n";
  os << "continuum_suspected: " << (r.continuum_suspected ? "true" : "false") << "\n";
  os << "values:\n";
  for (const auto& v : r.values) {
    os << "  - z: " << vec_text(v.z) << "\n";
    os << "    g: " << format_number(v.g) << "\n";
    os << "    on_boundary: " << (v.on_boundary ? "true" : "false") << "\n";
  }
  os << "duals:\n";
  for (const auto& y : r.duals) os << "  - " << vec_text(y) << "\n";
  os << "boundary_values:\n";
  for (const auto& z : r.boundary_values) os << "  - " << vec_text(z) << "\n";
  os << "local_maxima:\n";
  for (const auto& m : r.local_maxima) {
    os << "  - z: " << vec_text(m.z) << "\n";
    os << "    g: " << format_number(m.g) << "\n";
    os << "    degenerate: " << (m.degenerate ? "true" : "false") << "\n";
  }
  os << "measures:\n";
  for (const auto& m : measures) {
    std::ostringstream inner;
    write_perron_text(inner, m);
    std::string line;
    std::istringstream lines(inner.str());
    bool first = true;
    while (std::getline(lines, line)) {
      os << (first ? "  - " : "    ") << line << "\n";
      first = false;
    }
  }
}

void write_diagram_csv(std::ostream& os, const DiagramTable& t) {
  const Eigen::Index d = t.rows.empty() ? static_cast<Eigen::Index>(t.kept.size()) : t.rows.front().z.size();
  for (Eigen::Index i = 0; i < d; ++i) os << "z_" << i + 1 << ",";
  os << "h";
  for (Eigen::Index i = 0; i < d; ++i) os << ",grad_" << i + 1;
  os << ",status\n";
  for (const auto& row : t.rows) {
    for (Eigen::Index i = 0; i < d; ++i) os << format_number(row.z(i)) << ",";
    os << format_number(row.h);
    for (Eigen::Index i = 0; i < d; ++i) os << "," << format_number(row.grad_h(i));
    os << "," << to_string(row.status) << "\n";
  }
}

void write_diagram_text(std::ostream& os, const DiagramTable& t) {
  os << "grid: " << t.grid_spec << "\n";
  os << "reduced: " << (t.reduced ? "true" : "false") << "\n";
  os << "kept: [";
  for (std::size_t i = 0; i < t.kept.size(); ++i) os << (i ? ", " : "") << t.kept[i];
  os << "]\nrows:\n";
  for (const auto& row : t.rows) {
    os << "  - z: " << vec_text(row.z) << "\n";
    os << "    h: " << format_number(row.h) << "\n";
    os << "    grad_h: " << vec_text(row.grad_h) << "\n";
    os << "    status: " << to_string(row.status) << "\n";
  }
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& t) {
  const Eigen::Index d = t.rows.empty() ? 1 : t.rows.front().ensemble_mean.size();
  os << "n,log_zeta_over_n,gap";
  for (Eigen::Index i = 0; i < d; ++i) os << ",ensemble_mean_" << i + 1;
  os << ",dist_to_hull_V\n";
  for (const auto& r : t.rows) {
    os << r.n << "," << format_number(r.log_zeta_over_n) << "," << format_number(r.gap);
    for (Eigen::Index i = 0; i < d; ++i) os << "," << format_number(r.ensemble_mean(i));
    os << "," << format_number(r.dist_to_hull_V) << "\n";
  }
}

void write_convergence_text(std::ostream& os, const ConvergenceTable& t) {
  os << "monotone: " << (t.monotone ? "true" : "false") << "\nrows:\n";
  for (const auto& r : t.rows) {
    os << "  - n: " << r.n << "\n";
    os << "    log_zeta_over_n: " << format_number(r.log_zeta_over_n) << "\n";
    os << "    gap: " << format_number(r.gap) << "\n";
    os << "    ensemble_mean: " << vec_text(r.ensemble_mean) << "\n";
    os << "    dist_to_hull_V: " << format_number(r.dist_to_hull_V) << "\n";
  }
}

void write_scan_csv(std::ostream& os, const BetaScan& s) {
  std::size_t width = 0;
  for (const auto& row : s.value_branches) width = std::max(width, row.size());
  os << "beta,pressure,count";
  for (std::size_t i = 0; i < width; ++i) os << ",branch_z_" << i + 1;
  for (std::size_t i = 0; i < width; ++i) os << ",branch_g_" << i + 1;
  os << ",global_branch_index\n";
  for (std::size_t r = 0; r < s.betas.size(); ++r) {
    const auto& row = s.value_branches[r];
    os << format_number(s.betas[r]) << "," << format_number(s.pressures[r]) << "," << s.counts[r];
    int global = 0;
    for (std::size_t i = 0; i < width; ++i) {
      os << ",";
      if (i >= row.size()) continue;
      for (Eigen::Index k = 0; k < row[i].z.size(); ++k) os << (k ? ";" : "") << format_number(row[i].z(k));
      if (row[i].branch == s.global_branch[r]) global = static_cast<int>(i) + 1;
    }
    for (std::size_t i = 0; i < width; ++i) {
      os << ",";
      if (i < row.size()) os << format_number(row[i].g);
    }
    os << "," << global << "\n";
  }
}

void write_events_text(std::ostream& os, const std::vector<TransitionEvent>& events) {
  os << "events:\n";
  for (const auto& e : events) {
    os << "  - kind: " << to_string(e.kind) << "\n";
    os << "    beta: " << format_number(e.beta) << "\n";
    os << "    evidence:\n";
    os << "      grid_cell: [" << format_number(e.evidence.grid_left) << ", " << format_number(e.evidence.grid_right)
       << "]\n";
    os << "      count: [" << e.evidence.left_count << ", " << e.evidence.right_count << "]\n";
    os << "      derivative_jump: " << format_number(e.evidence.derivative_jump) << "\n";
    os << "      second_difference: " << format_number(e.evidence.second_difference) << "\n";
    os << "      noise_floor: " << format_number(e.evidence.noise_floor) << "\n";
    os << "      branches: [";
    for (std::size_t i = 0; i < e.evidence.branches.size(); ++i) os << (i ? ", " : "") << e.evidence.branches[i];
    os << "]\n";
  }
}

void write_freezing_text(std::ostream& os, const FreezingResult& r) {
  const FreezingVerdict& v = r.verdict;
  os << "beta_0: " << format_number(r.beta_0) << "\n";
  os << "ground_value: " << vec_text(r.ground_value) << "\n";
  os << "verdict:\n";
  os << "  epsilon_margin: " << format_number(v.epsilon_margin) << "\n";
  os << "  frozen_above: " << (v.frozen_above ? "true" : "false") << "\n";
  os << "  interior_below: " << (v.interior_below ? "true" : "false") << "\n";
  os << "  slope: " << format_number(v.slope) << "\n";
  os << "  expected_slope: " << format_number(v.expected_slope) << "\n";
  os << "  affine_residual: " << format_number(v.affine_residual) << "\n";
  auto list = [&](const char* name, const std::vector<double>& xs) {
    os << "  " << name << ": [";
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << format_number(xs[i]);
    os << "]\n";
  };
  list("betas_above", v.betas_above);
  list("pressures_above", v.pressures_above);
  list("betas_below", v.betas_below);
  list("pressures_below", v.pressures_below);
}

}  // namespace thermoform
