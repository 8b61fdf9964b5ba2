#pragma once

// Field persistence. Both formats store every value in shortest round-trip
// decimal form, so write followed by read is bitwise exact.
//
// Text: a header (magic, dim, extents, cells, eps, lam, column names), then
// one line per cell: index, center coordinates, rho1 rho2 u1_* u2_* s.
// CSV: the same header as '#' comment lines, a column-name row, then one row
// per cell with coordinates first (dim*2 + 3 + dim columns; 12 in 3D).

#include <stdexcept>
#include <string>
#include <vector>

#include "bifluid/fixed_point.hpp"

namespace bifluid {

enum class FieldFileFormat { Text, Csv };

/// Malformed field file; `offset` is the byte position of the offending line.
class FieldFormatError : public std::runtime_error {
 public:
  FieldFormatError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

std::string format_fields(const MixtureState& state, FieldFileFormat format);
MixtureState parse_fields(const std::string& content);

void write_fields(const MixtureState& state, const std::string& path, FieldFileFormat format);
/// Detects the format from the first line.
MixtureState read_fields(const std::string& path);

/// Column names of the CSV export, coordinates first.
std::vector<std::string> csv_columns(int dim);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// True when every field, the grid and both tags agree bit for bit.
bool bitwise_equal(const MixtureState& a, const MixtureState& b);

}  // namespace bifluid
