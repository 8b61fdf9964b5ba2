#include "bifluid/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace bifluid {

ConfigParseError::ConfigParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? sep : "") + v[k];
  return out;
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration: " + join(violations, "; ")), violations_(std::move(violations)) {}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  // Comma-separated when a comma is present, otherwise whitespace-separated.
  if (s.find(',') != std::string::npos) {
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
  } else {
    while (ss >> item) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, int line) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigParseError(line, "expected a number, got '" + s + "'");
  return x;
}

int parse_int(const std::string& s, int line) {
  int x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigParseError(line, "expected an integer, got '" + s + "'");
  return x;
}

bool parse_bool(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigParseError(line, "expected true or false, got '" + s + "'");
}

std::vector<double> parse_doubles(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item, line));
  return out;
}

template <std::size_t N, class T>
void parse_array(const std::string& s, int line, std::array<T, N>& out, std::size_t count) {
  const auto items = split_list(s);
  if (items.size() != count)
    throw ConfigParseError(line, "expected " + std::to_string(count) + " values, got " +
                                     std::to_string(items.size()));
  for (std::size_t k = 0; k < count; ++k) {
    if constexpr (std::is_same_v<T, int>)
      out[k] = parse_int(items[k], line);
    else
      out[k] = parse_double(items[k], line);
  }
}

int parse_axis(const std::string& s, int line) {
  if (s == "x" || s == "0") return 0;
  if (s == "y" || s == "1") return 1;
  if (s == "z" || s == "2") return 2;
  throw ConfigParseError(line, "expected an axis x, y or z, got '" + s + "'");
}

FieldFormat parse_format(const std::string& s, int line) {
  if (s == "text") return FieldFormat::Text;
  if (s == "csv") return FieldFormat::Csv;
  if (s == "both") return FieldFormat::Both;
  throw ConfigParseError(line, "expected text, csv or both, got '" + s + "'");
}

std::string format_name(FieldFormat f) {
  switch (f) {
    case FieldFormat::Text: return "text";
    case FieldFormat::Csv: return "csv";
    case FieldFormat::Both: return "both";
  }
  return "text";
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;
using Block = std::map<std::string, Setter>;

void set_entry(Mat2& m, const std::string& key, const std::string& v, int line) {
  m[key[key.size() - 2] - '1'][key[key.size() - 1] - '1'] = parse_double(v, line);
}

const std::map<std::string, Block>& schema() {
  static const std::map<std::string, Block> s = [] {
    std::map<std::string, Block> b;
    // Grid extents and cells may list dim values; a missing third entry keeps its default.
    b["grid"]["dim"] = [](RunConfig& c, const std::string& v, int l) { c.grid.dim = parse_int(v, l); };
    b["grid"]["extents"] = [](RunConfig& c, const std::string& v, int l) {
      const auto n = split_list(v).size();
      if (n != 2 && n != 3) throw ConfigParseError(l, "extents needs 2 or 3 values");
      parse_array(v, l, c.grid.extents, n);
    };
    b["grid"]["cells"] = [](RunConfig& c, const std::string& v, int l) {
      const auto n = split_list(v).size();
      if (n != 2 && n != 3) throw ConfigParseError(l, "cells needs 2 or 3 values");
      parse_array(v, l, c.grid.cells, n);
    };

    auto& p = b["params"];
    p["gamma"] = [](RunConfig& c, const std::string& v, int l) { c.params.gamma = parse_double(v, l); };
    p["m"] = [](RunConfig& c, const std::string& v, int l) { c.params.m = parse_double(v, l); };
    p["a"] = [](RunConfig& c, const std::string& v, int l) { c.params.a = parse_double(v, l); };
    p["mass1"] = [](RunConfig& c, const std::string& v, int l) { c.params.masses[0] = parse_double(v, l); };
    p["mass2"] = [](RunConfig& c, const std::string& v, int l) { c.params.masses[1] = parse_double(v, l); };
    p["forcing"] = [](RunConfig& c, const std::string& v, int l) {
      if (v != "none" && v != "constant" && v != "trig")
        throw ConfigParseError(l, "forcing preset must be none, constant or trig, got '" + v + "'");
      c.params.forcing = v;
    };
    p["forcing_magnitude"] = [](RunConfig& c, const std::string& v, int l) {
      c.params.forcing_magnitude = parse_double(v, l);
    };
    p["forcing_axis"] = [](RunConfig& c, const std::string& v, int l) { c.params.forcing_axis = parse_axis(v, l); };
    p["forcing_mode"] = [](RunConfig& c, const std::string& v, int l) { c.params.forcing_mode = parse_int(v, l); };
    p["theta_hat"] = [](RunConfig& c, const std::string& v, int l) {
      if (v != "constant" && v != "trig")
        throw ConfigParseError(l, "theta_hat preset must be constant or trig, got '" + v + "'");
      c.params.theta_hat = v;
    };
    p["theta_hat_value"] = [](RunConfig& c, const std::string& v, int l) {
      c.params.theta_hat_value = parse_double(v, l);
    };
    p["theta_hat_amplitude"] = [](RunConfig& c, const std::string& v, int l) {
      c.params.theta_hat_amplitude = parse_double(v, l);
    };
    p["theta_hat_mode"] = [](RunConfig& c, const std::string& v, int l) { c.params.theta_hat_mode = parse_int(v, l); };
    p["allow_unproven"] = [](RunConfig& c, const std::string& v, int l) { c.params.allow_unproven = parse_bool(v, l); };

    auto& vb = b["viscosity"];
    vb["preset"] = [](RunConfig& c, const std::string& v, int l) {
      for (const auto& pr : viscosity_presets())
        if (pr.name == v) {
          c.visc = pr.visc;
          return;
        }
      std::vector<std::string> names;
      for (const auto& pr : viscosity_presets()) names.push_back(pr.name);
      throw ConfigParseError(l, "unknown viscosity preset '" + v + "' (known: " + join(names, ", ") + ")");
    };
    for (const std::string prefix : {"lambda", "mu"})
      for (const std::string ij : {"11", "12", "21", "22"}) {
        const std::string key = prefix + ij;
        vb[key] = [key](RunConfig& c, const std::string& v, int l) {
          set_entry(key.rfind("lambda", 0) == 0 ? c.visc.lambda : c.visc.mu, key, v, l);
        };
      }

    auto& cb = b["continuation"];
    cb["lambda_schedule"] = [](RunConfig& c, const std::string& v, int l) {
      c.continuation.lambda_schedule = parse_doubles(v, l);
    };
    cb["eps_schedule"] = [](RunConfig& c, const std::string& v, int l) {
      c.continuation.eps_schedule = parse_doubles(v, l);
    };
    cb["damping"] = [](RunConfig& c, const std::string& v, int l) { c.continuation.damping = parse_double(v, l); };
    cb["fp_tol"] = [](RunConfig& c, const std::string& v, int l) { c.continuation.fp_tol = parse_double(v, l); };
    cb["fp_max_iters"] = [](RunConfig& c, const std::string& v, int l) {
      c.continuation.fp_max_iters = parse_int(v, l);
    };
    cb["stabilize"] = [](RunConfig& c, const std::string& v, int l) { c.continuation.stabilize = parse_bool(v, l); };
    cb["halt_on_failure"] = [](RunConfig& c, const std::string& v, int l) {
      c.continuation.halt_on_failure = parse_bool(v, l);
    };
    cb["linear_tol"] = [](RunConfig& c, const std::string& v, int l) { c.linear.rel_tol = parse_double(v, l); };
    cb["linear_max_iters"] = [](RunConfig& c, const std::string& v, int l) { c.linear.max_iters = parse_int(v, l); };

    auto& ob = b["output"];
    ob["directory"] = [](RunConfig& c, const std::string& v, int l) {
      if (v.empty()) throw ConfigParseError(l, "directory must not be empty");
      c.output.directory = v;
    };
    ob["snapshot_every"] = [](RunConfig& c, const std::string& v, int l) {
      c.output.snapshot_every = parse_int(v, l);
    };
    ob["field_format"] = [](RunConfig& c, const std::string& v, int l) {
      c.output.field_format = parse_format(v, l);
    };
    return b;
  }();
  return s;
}

}  // namespace

RunConfig parse_config_unchecked(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  const Block* block = nullptr;
  std::string block_name;
  std::map<std::string, int> seen;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigParseError(line, "unterminated block header '" + s + "'");
      block_name = trim(s.substr(1, s.size() - 2));
      const auto it = schema().find(block_name);
      if (it == schema().end()) throw ConfigParseError(line, "unknown block [" + block_name + "]");
      block = &it->second;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigParseError(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!block) throw ConfigParseError(line, "key '" + key + "' appears before any [block]");
    const auto it = block->find(key);
    if (it == block->end()) throw ConfigParseError(line, "unknown key '" + key + "' in block [" + block_name + "]");
    const std::string qualified = block_name + "." + key;
    if (const auto prev = seen.find(qualified); prev != seen.end())
      throw ConfigParseError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")");
    seen[qualified] = line;
    it->second(cfg, value, line);
  }
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = parse_config_unchecked(text);
  auto bad = cfg.violations();
  if (!bad.empty()) throw ConfigValidationError(std::move(bad));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------

Grid RunConfig::build_grid() const {
  return bifluid::build_grid(grid.dim, std::span<const double>(grid.extents.data(), grid.dim),
                             std::span<const int>(grid.cells.data(), grid.dim));
}

MixtureParams RunConfig::mixture_params() const {
  MixtureParams p;
  p.gamma = params.gamma;
  p.m = params.m;
  p.a = params.a;
  p.masses = params.masses;
  p.allow_unproven = params.allow_unproven;
  const double L0 = grid.extents[0];
  const int axis = params.forcing_axis;
  const double mag = params.forcing_magnitude;
  const double k = params.forcing_mode;
  VectorFunction f = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
  if (params.forcing == "constant") {
    f = [axis, mag](const Vec3&) {
      Vec3 v{0.0, 0.0, 0.0};
      v[axis] = mag;
      return v;
    };
  } else if (params.forcing == "trig") {
    f = [axis, mag, k, L0](const Vec3& x) {
      Vec3 v{0.0, 0.0, 0.0};
      v[axis] = mag * std::sin(k * std::numbers::pi * x[0] / L0);
      return v;
    };
  }
  p.forcing = {f, f};
  const double th = params.theta_hat_value;
  const double amp = params.theta_hat_amplitude;
  const double kt = params.theta_hat_mode;
  if (params.theta_hat == "trig")
    p.theta_hat = [th, amp, kt, L0](const Vec3& x) { return th + amp * std::cos(kt * std::numbers::pi * x[0] / L0); };
  else
    p.theta_hat = [th](const Vec3&) { return th; };
  return p;
}

std::vector<std::string> RunConfig::violations() const {
  std::vector<std::string> v;
  if (grid.dim != 2 && grid.dim != 3) v.push_back("grid: dim must be 2 or 3");
  for (int a = 0; a < std::min(std::max(grid.dim, 0), 3); ++a) {
    if (!(grid.extents[a] > 0.0)) v.push_back("grid: extents must be positive");
    if (grid.cells[a] < 4) v.push_back("grid: at least 4 cells per axis");
  }
  if (params.forcing_axis >= grid.dim) v.push_back("params: forcing_axis outside the grid dimension");
  if (params.forcing_mode < 1) v.push_back("params: forcing_mode must be at least 1");
  if (params.theta_hat_mode < 1) v.push_back("params: theta_hat_mode must be at least 1");
  if (!(params.theta_hat_value - std::abs(params.theta_hat_amplitude) > 0.0))
    v.push_back("params: theta_hat must stay positive (value > |amplitude|)");
  const ValidationReport rep = validate(mixture_params(), visc);
  for (const auto& f : rep.failures()) v.push_back("model: " + f);
  if (!params.allow_unproven)
    for (const auto& w : rep.warnings()) v.push_back("model: " + w + " (set allow_unproven = true to run anyway)");
  for (const auto& c : continuation.violations()) v.push_back("continuation: " + c);
  if (!(linear.rel_tol > 0.0 && linear.rel_tol < 1.0)) v.push_back("continuation: linear_tol must lie in (0, 1)");
  if (linear.max_iters < 1) v.push_back("continuation: linear_max_iters must be at least 1");
  if (output.snapshot_every < 0) v.push_back("output: snapshot_every must be nonnegative");
  return v;
}

// ---------------------------------------------------------------------------

namespace {

std::string list(const double* v, std::size_t n) {
  std::string out;
  for (std::size_t k = 0; k < n; ++k) out += (k ? ", " : "") + format_double(v[k]);
  return out;
}

std::string list(const int* v, std::size_t n) {
  std::string out;
  for (std::size_t k = 0; k < n; ++k) out += (k ? ", " : "") + std::to_string(v[k]);
  return out;
}

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  const std::size_t n = c.grid.dim == 2 ? 2 : 3;
  o << "[grid]\n";
  o << "dim = " << c.grid.dim << "\n";
  o << "extents = " << list(c.grid.extents.data(), n) << "\n";
  o << "cells = " << list(c.grid.cells.data(), n) << "\n";
  o << "\n[params]\n";
  o << "gamma = " << format_double(c.params.gamma) << "\n";
  o << "m = " << format_double(c.params.m) << "\n";
  o << "a = " << format_double(c.params.a) << "\n";
  o << "mass1 = " << format_double(c.params.masses[0]) << "\n";
  o << "mass2 = " << format_double(c.params.masses[1]) << "\n";
  o << "forcing = " << c.params.forcing << "\n";
  o << "forcing_magnitude = " << format_double(c.params.forcing_magnitude) << "\n";
  o << "forcing_axis = " << "xyz"[c.params.forcing_axis] << "\n";
  o << "forcing_mode = " << c.params.forcing_mode << "\n";
  o << "theta_hat = " << c.params.theta_hat << "\n";
  o << "theta_hat_value = " << format_double(c.params.theta_hat_value) << "\n";
  o << "theta_hat_amplitude = " << format_double(c.params.theta_hat_amplitude) << "\n";
  o << "theta_hat_mode = " << c.params.theta_hat_mode << "\n";
  o << "allow_unproven = " << flag(c.params.allow_unproven) << "\n";
  o << "\n[viscosity]\n";
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      o << "lambda" << i + 1 << j + 1 << " = " << format_double(c.visc.lambda[i][j]) << "\n";
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) o << "mu" << i + 1 << j + 1 << " = " << format_double(c.visc.mu[i][j]) << "\n";
  o << "\n[continuation]\n";
  o << "lambda_schedule = " << list(c.continuation.lambda_schedule.data(), c.continuation.lambda_schedule.size())
    << "\n";
  o << "eps_schedule = " << list(c.continuation.eps_schedule.data(), c.continuation.eps_schedule.size()) << "\n";
  o << "damping = " << format_double(c.continuation.damping) << "\n";
  o << "fp_tol = " << format_double(c.continuation.fp_tol) << "\n";
  o << "fp_max_iters = " << c.continuation.fp_max_iters << "\n";
  o << "stabilize = " << flag(c.continuation.stabilize) << "\n";
  o << "halt_on_failure = " << flag(c.continuation.halt_on_failure) << "\n";
  o << "linear_tol = " << format_double(c.linear.rel_tol) << "\n";
  o << "linear_max_iters = " << c.linear.max_iters << "\n";
  o << "\n[output]\n";
  o << "directory = " << c.output.directory << "\n";
  o << "snapshot_every = " << c.output.snapshot_every << "\n";
  o << "field_format = " << format_name(c.output.field_format) << "\n";
  return o.str();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto& ga = a.grid;
  const auto& gb = b.grid;
  const std::size_t n = ga.dim == 2 ? 2 : 3;
  if (ga.dim != gb.dim) return false;
  for (std::size_t k = 0; k < n; ++k)
    if (ga.extents[k] != gb.extents[k] || ga.cells[k] != gb.cells[k]) return false;
  const auto& pa = a.params;
  const auto& pb = b.params;
  if (pa.gamma != pb.gamma || pa.m != pb.m || pa.a != pb.a || pa.masses != pb.masses || pa.forcing != pb.forcing ||
      pa.forcing_magnitude != pb.forcing_magnitude || pa.forcing_axis != pb.forcing_axis ||
      pa.forcing_mode != pb.forcing_mode || pa.theta_hat != pb.theta_hat || pa.theta_hat_value != pb.theta_hat_value ||
      pa.theta_hat_amplitude != pb.theta_hat_amplitude || pa.theta_hat_mode != pb.theta_hat_mode ||
      pa.allow_unproven != pb.allow_unproven)
    return false;
  if (a.visc.lambda != b.visc.lambda || a.visc.mu != b.visc.mu) return false;
  const auto& ca = a.continuation;
  const auto& cb = b.continuation;
  if (ca.lambda_schedule != cb.lambda_schedule || ca.eps_schedule != cb.eps_schedule || ca.damping != cb.damping ||
      ca.fp_tol != cb.fp_tol || ca.fp_max_iters != cb.fp_max_iters || ca.stabilize != cb.stabilize ||
      ca.halt_on_failure != cb.halt_on_failure)
    return false;
  if (a.linear.rel_tol != b.linear.rel_tol || a.linear.max_iters != b.linear.max_iters) return false;
  return a.output.directory == b.output.directory && a.output.snapshot_every == b.output.snapshot_every &&
         a.output.field_format == b.output.field_format;
}

}  // namespace bifluid
