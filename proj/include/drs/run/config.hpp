#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drs/env/wireless.hpp"

namespace drs::run {

/// Full description of one training run. Everything here is overridable
/// from the key-value config file; the file is copied verbatim into the
/// output directory so a run can always be reproduced.
struct RunConfig {
  // [run]
  std::string env = "meclatency";  // meclatency | mountaincar
  std::string algo = "sac";        // sac | td3 | ddpg | reinforce
  bool dress_enabled = false;
  double beta = 0.2;          // auxiliary reward weight
  int diffusion_steps = 5;    // K
  long total_steps = 20000;
  uint64_t seed = 0;
  long eval_every = 5000;     // checkpoint cadence, steps
  std::string out_dir;

  // [env] (meclatency only; latency_limit doubles as the sweep axis)
  env::WirelessConfig wireless;

  // [train]
  std::vector<int> hidden{64, 64};
  int batch_size = 128;
  int buffer_capacity = 50000;
  int warmup_steps = 500;
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-4;
  double alpha_ent = 0.2;
  bool auto_tune_alpha = false;
  int update_every = 1;            // env steps per update phase
  bool update_per_episode = false; // episode-boundary update phase instead

  // [dress]
  int latent_dim = 8;
  int k_embed_dim = 8;
  double beta_schedule_start = 1e-4;
  double beta_schedule_end = 0.2;
  double reward_scale = 1.0;  // e_s
  double reward_bias = 0.0;   // e_b
  bool shifted_posterior_sampler = false;
  std::vector<int> dress_hidden{64, 64};
  std::vector<int> head_hidden{64};
  int dress_batch_size = 0;   // 0: use batch_size

  // [output]
  bool zero_wall_clock = false;  // pin wall_ms to 0 for byte-stable CSVs
  bool trace_enabled = false;    // wireless per-step trace.csv

  void validate() const;  // throws std::invalid_argument
};

/// Sweep grid around a base run; every (beta, K, latency, seed) cell
/// becomes one isolated run.
struct SweepConfig {
  RunConfig base;
  std::vector<double> beta_values{0.2, 0.4, 0.6, 0.8};
  std::vector<int> k_values{3, 5, 9, 15};
  std::vector<double> latency_values{0.02, 0.01};
  std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
};

/// INI-style sections of key = value lines; '#' and ';' start comments.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

RunConfig run_config_from(const ConfigMap& map);
SweepConfig sweep_config_from(const ConfigMap& map);

/// Round-trippable rendering of the effective config.
std::string render_config(const RunConfig& cfg);

}  // namespace drs::run
