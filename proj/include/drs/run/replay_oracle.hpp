#pragma once

#include <string>
#include <vector>

#include "drs/env/wireless.hpp"

namespace drs::run {

struct ReplayReport {
  long rows_checked = 0;
  double max_discrepancy = 0.0;  // worst |logged - recomputed| over all fields
  long case_mismatches = 0;
  std::string worst_field;
  long worst_row = -1;
};

/// Recomputes throughput, latency, reward, and the reward case for every
/// trace row from first principles (its own arithmetic, not the simulator
/// code paths) and compares against the logged values.
ReplayReport verify_trace_rows(const std::vector<std::string>& rows,
                               const env::WirelessConfig& config);

/// Reads a trace CSV (header line + rows) and verifies it.
ReplayReport verify_trace_file(const std::string& path,
                               const env::WirelessConfig& config);

}  // namespace drs::run
