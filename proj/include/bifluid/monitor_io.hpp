#pragma once

// MonitorRow series as CSV (header row of monitor_columns(), one row per eps
// stage) and as a JSON array of objects keyed by the same names. Doubles use
// shortest round-trip form; non-finite values become "nan"/"inf" in CSV and
// null in JSON.

#include <string>
#include <vector>

#include "bifluid/diagnostics.hpp"

namespace bifluid {

std::string format_monitor_csv(const std::vector<MonitorRow>& rows);
std::string format_monitor_json(const std::vector<MonitorRow>& rows);

}  // namespace bifluid
