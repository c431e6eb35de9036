#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace drs::run {

/// One row per finished episode. case1_fraction is the share of steps that
/// returned exactly zero environment feedback (outage steps).
struct MetricsRecord {
  long step = 0;  // global step count at episode end
  double episode_return_env = 0.0;
  double episode_return_aux = 0.0;
  long episode_len = 0;
  double case1_fraction = 0.0;
  long wall_ms = 0;
};

inline constexpr const char* kMetricsHeader =
    "step,episode_return_env,episode_return_aux,episode_len,case1_fraction,"
    "wall_ms";

std::string metrics_to_csv(const std::vector<MetricsRecord>& records);
void write_metrics_csv(const std::vector<MetricsRecord>& records,
                       const std::string& path);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

/// Trailing-window moving average of episode_return_env, one value per
/// record. window >= 1.
std::vector<double> smoothed_env_returns(const std::vector<MetricsRecord>& r,
                                         int window);

/// One sweep cell with its per-episode records.
struct SweepRun {
  double beta = 0.0;
  int k = 0;
  double latency_limit = 0.0;
  uint64_t seed = 0;
  std::vector<MetricsRecord> records;
};

/// Plot-ready long format: every episode row tagged with its grid cell.
std::string sweep_long_csv(const std::vector<SweepRun>& runs);

struct SweepSummaryRow {
  double beta = 0.0;
  int k = 0;
  double latency_limit = 0.0;
  int n_seeds = 0;
  double mean_final_return = 0.0;    // over seeds, of the last smoothed value
  double median_final_return = 0.0;
};

/// Aggregates seeds within each (beta, K, latency) cell using a smoothing
/// window over episode returns.
std::vector<SweepSummaryRow> sweep_summary(const std::vector<SweepRun>& runs,
                                           int smooth_window);
std::string sweep_summary_csv(const std::vector<SweepSummaryRow>& rows);

}  // namespace drs::run
