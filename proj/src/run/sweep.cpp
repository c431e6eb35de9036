#include "drs/run/sweep.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drs/run/trainer.hpp"

namespace drs::run {

std::vector<RunConfig> expand_sweep(const SweepConfig& sweep) {
  std::vector<RunConfig> out;
  for (double beta : sweep.beta_values) {
    for (int k : sweep.k_values) {
      for (double lat : sweep.latency_values) {
        for (uint64_t seed : sweep.seeds) {
          RunConfig cfg = sweep.base;
          cfg.beta = beta;
          cfg.diffusion_steps = k;
          cfg.wireless.latency_limit = lat;
          cfg.seed = seed;
          cfg.out_dir.clear();  // per-cell checkpoints are not kept
          cfg.validate();
          out.push_back(std::move(cfg));
        }
      }
    }
  }
  return out;
}

std::string sweep_cell_name(const RunConfig& cfg) {
  std::ostringstream o;
  o << "b" << cfg.beta << "_k" << cfg.diffusion_steps << "_l"
    << cfg.wireless.latency_limit << "_s" << cfg.seed;
  return o.str();
}

std::vector<SweepRun> run_sweep(const SweepConfig& sweep,
                                const std::string& out_dir) {
  auto cells = expand_sweep(sweep);
  std::vector<SweepRun> runs;
  runs.reserve(cells.size());
  for (const auto& cfg : cells) {
    SweepRun run;
    run.beta = cfg.beta;
    run.k = cfg.diffusion_steps;
    run.latency_limit = cfg.wireless.latency_limit;
    run.seed = cfg.seed;
    run.records = run_training(cfg);
    if (!out_dir.empty())
      write_metrics_csv(run.records,
                        out_dir + "/metrics_" + sweep_cell_name(cfg) + ".csv");
    runs.push_back(std::move(run));
  }
  if (!out_dir.empty()) {
    {
      std::ofstream f(out_dir + "/sweep_long.csv");
      if (!f) throw std::runtime_error("sweep: cannot write long CSV");
      f << sweep_long_csv(runs);
    }
    std::ofstream f(out_dir + "/sweep_summary.csv");
    if (!f) throw std::runtime_error("sweep: cannot write summary CSV");
    f << sweep_summary_csv(sweep_summary(runs, 10));
  }
  return runs;
}

}  // namespace drs::run
