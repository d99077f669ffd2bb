#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermoform::cli {

struct RunConfig {
  std::string command;  // pressure, entropy-diagram, equilibria, gibbs, scan, freezing, potts
  std::string model = "builtin:curie_weiss";
  std::string energy = "quadratic:1";
  std::string output = "-";
  std::string format;  // csv | text; empty picks the command's default
  std::string events;  // scan events file; "-" for stderr
  std::string dump_model;

  int grid = 101;
  std::vector<std::string> ranges;  // lo:hi per axis
  std::string beta_range;           // lo:hi:step
  std::vector<int> ns = {100, 500, 2000};
  std::vector<double> y;
  std::optional<double> beta;
  double beta_max = 10.0;
  int n_letters = 3;

  int starts_per_axis = 32;
  double tol_value = 1e-9;
  double tol_cluster = 1e-5;
  int n_scan = 20001;
  double beta_tol = 1e-8;
  double max_classes = 1e8;
  double max_dp_cells = 2e8;
};

// Parses argv; returns the exit code on --help or parse errors.
struct ParseResult {
  RunConfig config;
  std::optional<int> exit_code;
};
ParseResult parse_arguments(int argc, const char* const* argv);

// 0 on success, 2 input error, 3 budget exceeded, 4 numerical failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace thermoform::cli
