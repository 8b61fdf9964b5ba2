#pragma once

// Run configuration: a flat text file of named blocks
//
//   [grid]         dim, extents, cells
//   [params]       gamma, m, a, mass1, mass2, forcing preset, theta_hat preset
//   [viscosity]    preset and/or lambda11..lambda22, mu11..mu22
//   [continuation] schedules, damping, tolerances, iteration limits
//   [output]       directory, snapshot_every, field_format
//
// with `key = value` lines and `#` comments. Unknown blocks or keys are errors.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifluid/fixed_point.hpp"

namespace bifluid {

/// Syntax or type error anchored at a 1-based line number.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Semantic errors; every violation is listed.
class ConfigValidationError : public std::runtime_error {
 public:
  explicit ConfigValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

enum class FieldFormat { Text, Csv, Both };

struct GridConfig {
  int dim = 3;
  Vec3 extents{1.0, 1.0, 1.0};
  std::array<int, 3> cells{16, 16, 16};
};

struct ParamsConfig {
  double gamma = 4.0;
  double m = 4.0;
  double a = 1.0;
  std::array<double, 2> masses{1.0, 1.0};
  /// "none", "constant" (magnitude e_axis) or "trig" (magnitude sin(k pi x_0 / L_0) e_axis),
  /// applied to both components.
  std::string forcing = "none";
  double forcing_magnitude = 0.0;
  int forcing_axis = 2;
  int forcing_mode = 1;
  /// "constant" (value) or "trig" (value + amplitude cos(k pi x_0 / L_0)).
  std::string theta_hat = "constant";
  double theta_hat_value = 1.0;
  double theta_hat_amplitude = 0.0;
  int theta_hat_mode = 1;
  bool allow_unproven = false;
};

struct OutputConfig {
  std::string directory = "output";
  /// Dump fields every k-th eps stage; 0 writes the final stage only.
  int snapshot_every = 0;
  FieldFormat field_format = FieldFormat::Text;
};

struct RunConfig {
  GridConfig grid;
  ParamsConfig params;
  ViscosityMatrices visc{{{{0.0, 0.0}, {0.0, 0.0}}}, {{{1.0, 0.0}, {0.0, 1.0}}}};
  ContinuationConfig continuation;
  LinearSolveSpec linear;
  OutputConfig output;

  Grid build_grid() const;
  MixtureParams mixture_params() const;
  /// Structural and model violations; empty when the config is runnable.
  std::vector<std::string> violations() const;
};

/// Parses and validates; throws ConfigParseError or ConfigValidationError.
RunConfig parse_config(const std::string& text);
/// Parses without semantic validation.
RunConfig parse_config_unchecked(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config_unchecked(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

}  // namespace bifluid
