#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  const auto parsed = thermoform::cli::parse_arguments(argc, argv);
  if (parsed.exit_code) return *parsed.exit_code;
  return thermoform::cli::run(parsed.config, std::cout, std::cerr);
}
