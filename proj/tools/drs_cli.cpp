#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "drs/env/env.hpp"
#include "drs/run/config.hpp"
#include "drs/run/gradcheck.hpp"
#include "drs/run/metrics.hpp"
#include "drs/run/replay_oracle.hpp"
#include "drs/run/sweep.hpp"
#include "drs/run/trainer.hpp"

namespace {

using namespace drs;
using namespace drs::run;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

int cmd_train(const std::string& config_path, long seed_override,
              const std::string& out_override) {
  auto cfg = run_config_from(parse_config_file(config_path));
  if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (cfg.out_dir.empty()) cfg.out_dir = "run_out";
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);

  TrainHooks hooks;
  std::vector<std::string> trace;
  if (cfg.trace_enabled) hooks.wireless_trace = &trace;
  auto records = run_training(cfg, hooks);

  write_metrics_csv(records, cfg.out_dir + "/metrics.csv");
  write_text(cfg.out_dir + "/config.txt", render_config(cfg));
  if (cfg.trace_enabled && cfg.env == "meclatency") {
    std::ofstream f(cfg.out_dir + "/trace.csv");
    if (!f) throw std::runtime_error("cannot write trace.csv");
    f << env::WirelessEnv::trace_header(cfg.wireless.n_users) << "\n";
    for (const auto& row : trace) f << row << "\n";
  }
  double final_return = records.empty() ? 0.0 : records.back().episode_return_env;
  std::printf("train done: %zu episodes, %ld steps, final return %.6g -> %s\n",
              records.size(), cfg.total_steps, final_return,
              cfg.out_dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
  auto sweep = sweep_config_from(parse_config_file(config_path));
  std::filesystem::create_directories(out_dir);
  auto runs = run_sweep(sweep, out_dir);
  std::printf("sweep done: %zu runs -> %s\n", runs.size(), out_dir.c_str());
  return 0;
}

int cmd_gradcheck(int seeds) {
  bool ok = true;
  for (int s = 0; s < seeds; ++s) {
    auto results = run_gradcheck_suite(static_cast<uint64_t>(s));
    for (const auto& r : results) {
      if (!r.pass())
        std::printf("seed %d %-28s FAIL max_rel_err=%.3e tol=%.0e\n", s,
                    r.name.c_str(), r.max_rel_err, r.tolerance);
      ok = ok && r.pass();
    }
  }
  std::printf("gradcheck %s (%d seeds)\n", ok ? "PASS" : "FAIL", seeds);
  return ok ? 0 : 1;
}

int cmd_replay(const std::string& trace_path, const std::string& config_path) {
  env::WirelessConfig wcfg;
  if (!config_path.empty())
    wcfg = run_config_from(parse_config_file(config_path)).wireless;
  auto report = verify_trace_file(trace_path, wcfg);
  std::printf(
      "replay: %ld rows, max discrepancy %.3e (%s at row %ld), "
      "%ld case mismatches\n",
      report.rows_checked, report.max_discrepancy, report.worst_field.c_str(),
      report.worst_row, report.case_mismatches);
  const bool ok = report.max_discrepancy < 1e-9 && report.case_mismatches == 0;
  std::printf("replay %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusion-shaped reward RL runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, trace_path;
  long seed_override = -1;
  int gradcheck_seeds = 10;

  auto* train = app.add_subcommand("train", "run one training job");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--seed", seed_override, "override [run] seed");
  train->add_option("--out", out_dir, "override output directory");

  auto* sweep = app.add_subcommand("sweep", "run the full grid serially");
  sweep->add_option("--config", config_path, "config file with [sweep]")
      ->required();
  sweep->add_option("--out", out_dir, "output directory")
      ->default_val("sweep_out");

  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient suites");
  gradcheck->add_option("--seeds", gradcheck_seeds, "number of seeds");

  auto* replay =
      app.add_subcommand("replay", "re-verify environment math from a trace");
  replay->add_option("--trace", trace_path, "trace CSV")->required();
  replay->add_option("--config", config_path, "config for env parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, seed_override, out_dir);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir);
    if (gradcheck->parsed()) return cmd_gradcheck(gradcheck_seeds);
    if (replay->parsed()) return cmd_replay(trace_path, config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
