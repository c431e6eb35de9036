#pragma once

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "drs/env/mountain_car.hpp"
#include "drs/env/wireless.hpp"

namespace drs::env {

/// Uniform training-side interface: observations are flat vectors, actions
/// are raw network outputs in [-1,1]^d. Environment-specific constraints
/// (the allocation simplexes) are applied inside step().
class Env {
 public:
  virtual ~Env() = default;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual std::vector<double> reset(std::mt19937_64& rng) = 0;

  struct Step {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    bool zero_feedback = false;  // outage step (wireless Case 1)
  };
  virtual Step step(std::span<const double> raw_action, std::mt19937_64& rng) = 0;
};

class WirelessEnv : public Env {
 public:
  explicit WirelessEnv(WirelessConfig config);
  int observation_dim() const override { return env::observation_dim(config_); }
  int action_dim() const override { return env::action_dim(config_); }
  std::vector<double> reset(std::mt19937_64& rng) override;
  Step step(std::span<const double> raw_action, std::mt19937_64& rng) override;

  const WirelessConfig& config() const { return config_; }
  const NetworkState& state() const { return state_; }

  /// When set, every step appends one trace row (see trace_header()).
  void set_trace(std::vector<std::string>* sink) { trace_ = sink; }
  static std::string trace_header(int n_users);

 private:
  WirelessConfig config_;
  NetworkState state_;
  std::vector<std::string>* trace_ = nullptr;
};

class MountainCarEnv : public Env {
 public:
  int observation_dim() const override { return 2; }
  int action_dim() const override { return 1; }
  std::vector<double> reset(std::mt19937_64& rng) override;
  Step step(std::span<const double> raw_action, std::mt19937_64& rng) override;

 private:
  CarState state_;
  int steps_ = 0;
};

std::unique_ptr<Env> make_env(const std::string& name, const WirelessConfig& wireless);

}  // namespace drs::env
