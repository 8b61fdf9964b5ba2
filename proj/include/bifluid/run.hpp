#pragma once

// Run orchestration: validate, sweep eps, write monitor series, field dumps
// and a manifest. Exit statuses: 0 every stage converged, 1 configuration
// error, 2 some stage failed (outputs are still written).

#include <iosfwd>
#include <optional>
#include <string>

#include "bifluid/config.hpp"

namespace bifluid {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartial = 2;

inline constexpr const char* kVersion = "0.1.0";

/// Command-line overrides applied on top of the config file.
struct RunOptions {
  std::optional<std::string> output_dir;
  bool allow_unproven = false;
  bool halt_on_failure = false;
  std::optional<int> snapshot_every;
};

void apply_options(RunConfig& cfg, const RunOptions& opt);

/// Runs a validated config. Progress goes to `log`.
int run(const RunConfig& cfg, std::ostream& log);

/// Loads, applies overrides, validates and runs; configuration problems are
/// reported to `err` with exit status 1.
int run_config_file(const std::string& path, const RunOptions& opt, std::ostream& log, std::ostream& err);

/// Verification suite; writes verification.json when `output_dir` is given.
/// Exit 0 iff every spot check and order threshold passes, else 2.
int run_verify(const std::optional<std::string>& output_dir, std::ostream& log);

}  // namespace bifluid
