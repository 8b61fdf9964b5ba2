#include "bifluid/field_io.hpp"

#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bifluid/config.hpp"

namespace bifluid {

FieldFormatError::FieldFormatError(std::size_t offset, const std::string& what)
    : std::runtime_error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

namespace {

constexpr const char* kMagicText = "bifluid-fields text 1";
constexpr const char* kMagicCsv = "# bifluid-fields csv 1";
constexpr const char* kAxes = "xyz";

std::vector<std::string> value_columns(int dim) {
  std::vector<std::string> c{"rho1", "rho2"};
  for (int i = 1; i <= 2; ++i)
    for (int a = 0; a < dim; ++a) c.push_back("u" + std::to_string(i) + "_" + kAxes[a]);
  c.push_back("s");
  return c;
}

void append_values(std::string& out, const MixtureState& st, std::size_t c, char sep) {
  const int dim = st.s.grid().dim;
  auto put = [&](double v) {
    out += sep;
    out += format_double(v);
  };
  put(st.rho[0][c]);
  put(st.rho[1][c]);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < dim; ++a) put(st.u[i].comp(a)[c]);
  put(st.s[c]);
}

}  // namespace

std::vector<std::string> csv_columns(int dim) {
  std::vector<std::string> c;
  for (int a = 0; a < dim; ++a) c.emplace_back(1, kAxes[a]);
  for (auto& v : value_columns(dim)) c.push_back(v);
  return c;
}

std::string format_fields(const MixtureState& st, FieldFileFormat format) {
  const Grid& g = st.s.grid();
  const bool csv = format == FieldFileFormat::Csv;
  const std::string pre = csv ? "# " : "";
  std::string out;
  out.reserve(g.size() * (csv ? 200 : 210) + 256);
  out += csv ? kMagicCsv : kMagicText;
  out += "\n" + pre + "dim " + std::to_string(g.dim) + "\n" + pre + "extents";
  for (int a = 0; a < g.dim; ++a) out += " " + format_double(g.extents[a]);
  out += "\n" + pre + "cells";
  for (int a = 0; a < g.dim; ++a) out += " " + std::to_string(g.cells[a]);
  out += "\n" + pre + "eps " + format_double(st.eps) + "\n" + pre + "lam " + format_double(st.lam) + "\n";
  if (csv) {
    const auto cols = csv_columns(g.dim);
    for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
  } else {
    out += "columns index";
    for (int a = 0; a < g.dim; ++a) out += std::string(" ") + kAxes[a];
    for (const auto& c : value_columns(g.dim)) out += " " + c;
  }
  out += "\n";
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Vec3 x = g.center(c);
    if (csv) {
      out += format_double(x[0]);
      for (int a = 1; a < g.dim; ++a) out += "," + format_double(x[a]);
      append_values(out, st, c, ',');
    } else {
      out += std::to_string(c);
      for (int a = 0; a < g.dim; ++a) out += " " + format_double(x[a]);
      append_values(out, st, c, ' ');
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& s) : s_(s) {}

  /// Next line without its terminator; false at end of input.
  bool next(std::string& line) {
    if (pos_ >= s_.size()) return false;
    start_ = pos_;
    const auto nl = s_.find('\n', pos_);
    if (nl == std::string::npos) {
      line = s_.substr(pos_);
      pos_ = s_.size();
      terminated_ = false;
    } else {
      line = s_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      terminated_ = true;
    }
    return true;
  }
  std::size_t line_start() const { return start_; }
  std::size_t position() const { return pos_; }
  bool terminated() const { return terminated_; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0, start_ = 0;
  bool terminated_ = true;
};

std::vector<std::string> tokens(const std::string& line, char sep) {
  std::vector<std::string> out;
  if (sep == ',') {
    std::size_t b = 0;
    while (true) {
      const auto e = line.find(',', b);
      out.push_back(line.substr(b, e == std::string::npos ? std::string::npos : e - b));
      if (e == std::string::npos) break;
      b = e + 1;
    }
  } else {
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) out.push_back(t);
  }
  return out;
}

double to_double(const std::string& t, std::size_t offset) {
  double x = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw FieldFormatError(offset, "malformed number '" + t + "'");
  return x;
}

long long to_integer(const std::string& t, std::size_t offset) {
  long long x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw FieldFormatError(offset, "malformed integer '" + t + "'");
  return x;
}

/// Header line "<prefix>key v1 v2 ..."; returns the values.
std::vector<std::string> header_line(LineReader& r, const std::string& prefix, const std::string& key) {
  std::string line;
  if (!r.next(line)) throw FieldFormatError(r.position(), "truncated header: missing '" + key + "'");
  if (line.rfind(prefix + key, 0) != 0)
    throw FieldFormatError(r.line_start(), "expected header '" + key + "', got '" + line + "'");
  auto t = tokens(line.substr(prefix.size() + key.size()), ' ');
  return t;
}

}  // namespace

MixtureState parse_fields(const std::string& content) {
  LineReader r(content);
  std::string line;
  if (!r.next(line)) throw FieldFormatError(0, "empty field file");
  bool csv = false;
  if (line == kMagicCsv)
    csv = true;
  else if (line != kMagicText)
    throw FieldFormatError(0, "not a field file (unrecognized first line)");
  const std::string pre = csv ? "# " : "";

  auto dim_t = header_line(r, pre, "dim");
  const std::size_t dim_at = r.line_start();
  if (dim_t.size() != 1) throw FieldFormatError(dim_at, "dim needs one value");
  const int dim = static_cast<int>(to_integer(dim_t[0], dim_at));
  if (dim != 2 && dim != 3) throw FieldFormatError(dim_at, "dim must be 2 or 3");
  auto ext_t = header_line(r, pre, "extents");
  const std::size_t ext_at = r.line_start();
  auto cell_t = header_line(r, pre, "cells");
  const std::size_t cell_at = r.line_start();
  if (static_cast<int>(ext_t.size()) != dim) throw FieldFormatError(ext_at, "extents needs dim values");
  if (static_cast<int>(cell_t.size()) != dim) throw FieldFormatError(cell_at, "cells needs dim values");
  std::vector<double> ext;
  std::vector<int> cells;
  for (int a = 0; a < dim; ++a) {
    ext.push_back(to_double(ext_t[a], ext_at));
    cells.push_back(static_cast<int>(to_integer(cell_t[a], cell_at)));
  }
  Grid g;
  try {
    g = build_grid(dim, ext, cells);
  } catch (const std::exception& e) {
    throw FieldFormatError(ext_at, std::string("invalid grid: ") + e.what());
  }
  auto eps_t = header_line(r, pre, "eps");
  if (eps_t.size() != 1) throw FieldFormatError(r.line_start(), "eps needs one value");
  const double eps = to_double(eps_t[0], r.line_start());
  auto lam_t = header_line(r, pre, "lam");
  if (lam_t.size() != 1) throw FieldFormatError(r.line_start(), "lam needs one value");
  const double lam = to_double(lam_t[0], r.line_start());

  if (!r.next(line)) throw FieldFormatError(r.position(), "truncated header: missing column names");
  std::vector<std::string> expected_cols;
  if (csv) {
    expected_cols = csv_columns(dim);
  } else {
    expected_cols = {"columns", "index"};
    for (int a = 0; a < dim; ++a) expected_cols.emplace_back(1, kAxes[a]);
    for (auto& c : value_columns(dim)) expected_cols.push_back(c);
  }
  if (tokens(line, csv ? ',' : ' ') != expected_cols)
    throw FieldFormatError(r.line_start(), "unexpected column names '" + line + "'");

  MixtureState st;
  st.eps = eps;
  st.lam = lam;
  st.rho = {Field(g), Field(g)};
  st.u = {VectorField(g), VectorField(g)};
  st.s = Field(g);
  const std::size_t width = (csv ? 0 : 1) + dim + value_columns(dim).size();
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!r.next(line))
      throw FieldFormatError(r.position(), "truncated: expected " + std::to_string(g.size()) + " cell rows, found " +
                                               std::to_string(c));
    if (!r.terminated()) throw FieldFormatError(r.line_start(), "truncated: last row has no line terminator");
    const std::size_t at = r.line_start();
    const auto t = tokens(line, csv ? ',' : ' ');
    if (t.size() != width)
      throw FieldFormatError(at, "row " + std::to_string(c) + " has " + std::to_string(t.size()) + " values, expected " +
                                     std::to_string(width));
    std::size_t k = 0;
    if (!csv && to_integer(t[k++], at) != static_cast<long long>(c))
      throw FieldFormatError(at, "row index out of sequence at cell " + std::to_string(c));
    const Vec3 x = g.center(c);
    for (int a = 0; a < dim; ++a)
      if (to_double(t[k++], at) != x[a])
        throw FieldFormatError(at, "cell " + std::to_string(c) + " coordinates do not match the grid");
    st.rho[0][c] = to_double(t[k++], at);
    st.rho[1][c] = to_double(t[k++], at);
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < dim; ++a) st.u[i].comp(a)[c] = to_double(t[k++], at);
    st.s[c] = to_double(t[k++], at);
  }
  while (r.next(line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw FieldFormatError(r.line_start(), "trailing content after the last cell row");
  return st;
}

// ---------------------------------------------------------------------------

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_fields(const MixtureState& state, const std::string& path, FieldFileFormat format) {
  atomic_write_file(path, format_fields(state, format));
}

MixtureState read_fields(const std::string& path) { return parse_fields(read_file(path)); }

bool bitwise_equal(const MixtureState& a, const MixtureState& b) {
  auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() && (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  };
  auto same_scalar = [](double x, double y) { return std::memcmp(&x, &y, sizeof(double)) == 0; };
  if (!(a.s.grid() == b.s.grid()) || !same_scalar(a.eps, b.eps) || !same_scalar(a.lam, b.lam)) return false;
  if (!same(a.s.data(), b.s.data())) return false;
  for (int i = 0; i < 2; ++i) {
    if (!same(a.rho[i].data(), b.rho[i].data())) return false;
    for (int k = 0; k < 3; ++k)
      if (!same(a.u[i].comp(k), b.u[i].comp(k))) return false;
  }
  return true;
}

}  // namespace bifluid
