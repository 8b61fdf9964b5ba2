// Command-line front end: run, verify, validate, inspect.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bifluid/config.hpp"
#include "bifluid/field_io.hpp"
#include "bifluid/run.hpp"

namespace {

using namespace bifluid;

int validate_command(const std::string& path, bool allow_unproven) {
  RunConfig cfg;
  try {
    cfg = parse_config_unchecked(read_file(path));
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kExitConfigError;
  }
  if (allow_unproven) cfg.params.allow_unproven = true;
  const ValidationReport rep = validate(cfg.mixture_params(), cfg.visc);
  for (const auto& c : rep.checks)
    std::cout << (c.passed ? "  ok    " : c.waivable ? "  warn  " : "  FAIL  ") << c.name << ": " << c.detail << "\n";
  std::cout << "  c0 = " << format_double(cfg.visc.c0()) << "\n";
  const auto bad = cfg.violations();
  if (!bad.empty()) {
    std::cerr << path << ": invalid configuration\n";
    for (const auto& v : bad) std::cerr << "  " << v << "\n";
    return kExitConfigError;
  }
  std::cout << path << ": valid\n";
  return kExitOk;
}

void summarize(const std::string& name, const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  std::cout << "  " << name << ": min " << format_double(lo) << "  max " << format_double(hi) << "  mean "
            << format_double(v.empty() ? 0.0 : sum / static_cast<double>(v.size())) << "\n";
}

int inspect_command(const std::string& path) {
  MixtureState st;
  try {
    st = read_fields(path);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kExitConfigError;
  }
  const Grid& g = st.s.grid();
  std::cout << path << "\n  dim " << g.dim << "  cells";
  for (int a = 0; a < g.dim; ++a) std::cout << " " << g.cells[a];
  std::cout << "  extents";
  for (int a = 0; a < g.dim; ++a) std::cout << " " << format_double(g.extents[a]);
  std::cout << "\n  eps " << format_double(st.eps) << "  lam " << format_double(st.lam) << "\n";
  summarize("rho1", st.rho[0].data());
  summarize("rho2", st.rho[1].data());
  const char* axes = "xyz";
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < g.dim; ++a)
      summarize("u" + std::to_string(i + 1) + "_" + axes[a], st.u[i].comp(a));
  summarize("s", st.s.data());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady two-velocity heat-conducting mixture solver"};
  app.set_version_flag("--version", bifluid::kVersion);
  app.require_subcommand(0, 1);

  bool top_verify = false;
  app.add_flag("--verify", top_verify, "Run the verification suite");

  RunOptions opt;
  std::string config_path;
  bool run_verify_flag = false;
  std::string out_dir;
  int snapshot_every = -1;
  auto* run = app.add_subcommand("run", "Run the eps continuation for a config file");
  run->add_option("config", config_path, "Config file");
  run->add_option("--output-dir", out_dir, "Output directory (overrides the config)");
  run->add_flag("--allow-unproven", opt.allow_unproven, "Run parameters outside the proven range");
  run->add_flag("--halt-on-failure", opt.halt_on_failure, "Stop at the first failed eps stage");
  run->add_option("--snapshot-every", snapshot_every, "Dump fields every k-th eps stage")->check(CLI::NonNegativeNumber);
  run->add_flag("--verify", run_verify_flag, "Run the verification suite instead");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Manufactured-solution verification suite");
  verify->add_option("--output-dir", verify_dir, "Write verification.json here");

  std::string validate_path;
  bool validate_unproven = false;
  auto* validate = app.add_subcommand("validate", "Parse and validate a config file");
  validate->add_option("config", validate_path, "Config file")->required();
  validate->add_flag("--allow-unproven", validate_unproven, "Accept parameters outside the proven range");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Summarize a field dump");
  inspect->add_option("fields", inspect_path, "Field file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (top_verify) return run_verify(std::nullopt, std::cout);
    if (*verify) return run_verify(verify_dir.empty() ? std::nullopt : std::optional<std::string>(verify_dir), std::cout);
    if (*validate) return validate_command(validate_path, validate_unproven);
    if (*inspect) return inspect_command(inspect_path);
    if (*run) {
      if (!out_dir.empty()) opt.output_dir = out_dir;
      if (run_verify_flag) return run_verify(opt.output_dir, std::cout);
      if (config_path.empty()) {
        std::cerr << "run: a config file is required\n";
        return kExitConfigError;
      }
      if (snapshot_every >= 0) opt.snapshot_every = snapshot_every;
      return run_config_file(config_path, opt, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  std::cout << app.help();
  return kExitConfigError;
}
