#include "bifluid/monitor_io.hpp"

#include <cmath>

#include <json.hpp>

#include "bifluid/config.hpp"

namespace bifluid {

namespace {

bool integral_column(const std::string& name) { return name == "fp_iterations" || name == "converged"; }

}  // namespace

std::string format_monitor_csv(const std::vector<MonitorRow>& rows) {
  const auto& cols = monitor_columns();
  std::string out;
  for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
  out += "\n";
  for (const auto& row : rows) {
    const auto vals = monitor_values(row);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (k) out += ",";
      out += integral_column(cols[k]) ? std::to_string(static_cast<long long>(vals[k])) : format_double(vals[k]);
    }
    out += "\n";
  }
  return out;
}

std::string format_monitor_json(const std::vector<MonitorRow>& rows) {
  const auto& cols = monitor_columns();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    const auto vals = monitor_values(row);
    nlohmann::ordered_json obj;
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (cols[k] == "converged")
        obj[cols[k]] = vals[k] != 0.0;
      else if (cols[k] == "fp_iterations")
        obj[cols[k]] = static_cast<long long>(vals[k]);
      else if (std::isfinite(vals[k]))
        obj[cols[k]] = vals[k];
      else
        obj[cols[k]] = nullptr;
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

}  // namespace bifluid
