#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "drs/run/config.hpp"
#include "drs/run/metrics.hpp"

namespace drs::run {

/// Per-step view handed to on_step: raw (pre-projection) action, raw and
/// combined rewards. Spans are only valid during the callback.
struct StepView {
  long step = 0;  // 1-based global step
  std::span<const double> observation;
  std::span<const double> action;
  double r_env = 0.0;
  double r_aux = 0.0;
  double r_total = 0.0;
  bool done = false;
};

struct TrainHooks {
  // ordered event names: act, step, generate, combine, store, update
  std::vector<std::string>* debug_events = nullptr;
  std::function<void(const StepView&)> on_step;
  // wireless per-step trace rows (see WirelessEnv::trace_header)
  std::vector<std::string>* wireless_trace = nullptr;
};

/// Runs one training loop to completion and returns per-episode metrics.
/// When cfg.out_dir is set, checkpoints land there every eval_every steps
/// and at the end; metrics/config/trace files are the caller's business.
std::vector<MetricsRecord> run_training(const RunConfig& cfg,
                                        const TrainHooks& hooks = {});

}  // namespace drs::run
