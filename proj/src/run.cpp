#include "bifluid/run.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bifluid/continuation.hpp"
#include "bifluid/field_io.hpp"
#include "bifluid/monitor_io.hpp"
#include "bifluid/verification.hpp"

namespace bifluid {

namespace fs = std::filesystem;

void apply_options(RunConfig& cfg, const RunOptions& opt) {
  if (opt.output_dir) cfg.output.directory = *opt.output_dir;
  if (opt.allow_unproven) cfg.params.allow_unproven = true;
  if (opt.halt_on_failure) cfg.continuation.halt_on_failure = true;
  if (opt.snapshot_every) cfg.output.snapshot_every = *opt.snapshot_every;
}

namespace {

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

nlohmann::ordered_json versions() {
  nlohmann::ordered_json v;
  v["bifluid"] = kVersion;
  v["compiler"] = __VERSION__;
  v["cplusplus"] = __cplusplus;
#ifdef BIFLUID_HAVE_OPENMP
  v["openmp"] = true;
#else
  v["openmp"] = false;
#endif
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

std::vector<FieldFileFormat> field_formats(FieldFormat f) {
  switch (f) {
    case FieldFormat::Text: return {FieldFileFormat::Text};
    case FieldFormat::Csv: return {FieldFileFormat::Csv};
    case FieldFormat::Both: return {FieldFileFormat::Text, FieldFileFormat::Csv};
  }
  return {FieldFileFormat::Text};
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  const auto bad = cfg.violations();
  if (!bad.empty()) {
    for (const auto& v : bad) log << "config error: " << v << "\n";
    return kExitConfigError;
  }
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(cfg.output.directory);
  fs::create_directories(dir);

  Problem pb(cfg.build_grid(), cfg.mixture_params(), cfg.visc);
  pb.linear = cfg.linear;
  std::vector<std::string> outputs;
  const std::size_t n_eps = cfg.continuation.eps_schedule.size();
  auto dump = [&](std::size_t k, const MixtureState& st) {
    for (FieldFileFormat f : field_formats(cfg.output.field_format)) {
      const std::string name =
          "fields_eps_" + std::to_string(k) + (f == FieldFileFormat::Text ? ".dat" : ".csv");
      write_fields(st, (dir / name).string(), f);
      outputs.push_back(name);
    }
  };
  std::size_t last_dumped = static_cast<std::size_t>(-1);
  auto on_stage = [&](std::size_t k, const MixtureState& st, const MonitorRow& row) {
    log << "eps[" << k << "] = " << format_double(row.eps) << "  iterations " << row.fp_iterations
        << (row.converged ? "  converged" : "  FAILED") << "\n";
    const int every = cfg.output.snapshot_every;
    if (every > 0 && (k + 1) % static_cast<std::size_t>(every) == 0) {
      dump(k, st);
      last_dumped = k;
    }
  };

  ContinuationResult res;
  std::string error;
  try {
    res = run_epsilon_continuation(cfg.continuation, pb, on_stage);
  } catch (const std::exception& e) {
    error = e.what();
    log << "run aborted: " << error << "\n";
  }
  if (!res.states.empty() && last_dumped != res.states.size() - 1) dump(res.states.size() - 1, res.states.back());

  atomic_write_file((dir / "monitor.csv").string(), format_monitor_csv(res.rows));
  atomic_write_file((dir / "monitor.json").string(), format_monitor_json(res.rows));
  outputs.insert(outputs.begin(), {"monitor.csv", "monitor.json"});

  const bool ok = error.empty() && res.converged && res.stages.size() == n_eps;
  const int status = ok ? kExitOk : kExitPartial;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json m;
  m["timestamp"] = utc_timestamp();
  m["exit_status"] = status;
  m["converged"] = ok;
  m["wall_time_seconds"] = wall;
  m["versions"] = versions();
  m["config"] = serialize_config(cfg);
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  nlohmann::ordered_json failed = nlohmann::ordered_json::array();
  for (const auto& s : res.stages) {
    nlohmann::ordered_json j;
    j["eps"] = s.eps;
    j["converged"] = s.converged;
    j["iterations"] = s.iterations;
    j["failure"] = s.failure;
    stages.push_back(j);
    if (!s.converged) failed.push_back(s.eps);
  }
  m["stages"] = stages;
  m["failed_eps"] = failed;
  if (res.stages.size() < n_eps) {
    nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
    for (std::size_t k = res.stages.size(); k < n_eps; ++k) skipped.push_back(cfg.continuation.eps_schedule[k]);
    m["skipped_eps"] = skipped;
  }
  if (!error.empty()) m["error"] = error;
  m["outputs"] = outputs;
  atomic_write_file((dir / "manifest.json").string(), m.dump(2) + "\n");

  log << (ok ? "all eps stages converged" : "run finished with failures") << "; outputs in " << dir.string() << "\n";
  return status;
}

int run_config_file(const std::string& path, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config_unchecked(read_file(path));
  } catch (const ConfigParseError& e) {
    err << path << ": " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfigError;
  }
  apply_options(cfg, opt);
  const auto bad = cfg.violations();
  if (!bad.empty()) {
    err << path << ": invalid configuration\n";
    for (const auto& v : bad) err << "  " << v << "\n";
    return kExitConfigError;
  }
  return run(cfg, log);
}

int run_verify(const std::optional<std::string>& output_dir, std::ostream& log) {
  const VerificationSummary sum = run_verification_suite();
  log << "source spot checks: " << (sum.spot_checks_passed ? "pass" : "FAIL") << "\n";
  for (const auto& c : sum.checks) {
    log << std::left << std::setw(8) << c.case_name << std::setw(9) << c.target << std::setw(6) << c.field
        << " order " << std::fixed << std::setprecision(3) << c.order << " (>= " << std::setprecision(1)
        << c.threshold << ")" << (c.exact ? " exact" : "") << "  " << (c.passed ? "pass" : "FAIL") << "\n";
    log.unsetf(std::ios::fixed);
  }
  if (output_dir) {
    fs::create_directories(*output_dir);
    atomic_write_file((fs::path(*output_dir) / "verification.json").string(), sum.to_json() + "\n");
  }
  log << (sum.passed ? "verification passed" : "verification FAILED") << "\n";
  return sum.passed ? kExitOk : kExitPartial;
}

}  // namespace bifluid
