#pragma once

// Run configuration in a flat INI-like format:
//
//   # comment
//   [system]
//   kind = toral_automorphism
//   matrix = 2 1; 1 1
//
// Blocks: system (required), horizons, verify, pesin, search, run, output.
// Unknown blocks or keys, duplicates and malformed values are rejected with
// a "line:column" diagnostic.

#include "oslab/harness.hpp"

#include <cstdint>
#include <istream>
#include <string>

namespace oslab {

enum class OutputFormat { json, csv };

struct RunConfig {
  SystemSpec system;
  VerifyConfig verify;  // horizons, epsilon, eta, pesin, search, seed, threads
  int renorm_period = 1;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::json;
};

/// Carries the position of the offending token (1-based).
class ConfigError : public InputError {
 public:
  ConfigError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace oslab
