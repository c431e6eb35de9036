#pragma once

#include <string>
#include <vector>

#include "drs/run/config.hpp"
#include "drs/run/metrics.hpp"

namespace drs::run {

/// Expands the grid into per-run configs, one cell per
/// (beta, K, latency_limit, seed), in deterministic order.
std::vector<RunConfig> expand_sweep(const SweepConfig& sweep);

/// Runs every cell serially. When out_dir is non-empty, writes one metrics
/// CSV per run plus the long-format and summary CSVs there.
std::vector<SweepRun> run_sweep(const SweepConfig& sweep,
                                const std::string& out_dir);

/// File name stem for one cell, stable across runs.
std::string sweep_cell_name(const RunConfig& cfg);

}  // namespace drs::run
