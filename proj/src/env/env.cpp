#include "drs/env/env.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace drs::env {

WirelessEnv::WirelessEnv(WirelessConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<double> WirelessEnv::reset(std::mt19937_64& rng) {
  state_ = env::reset(config_, rng);
  return encode_observation(state_, config_);
}

std::string WirelessEnv::trace_header(int n_users) {
  std::ostringstream h;
  h << "t";
  for (int i = 0; i < n_users; ++i)
    h << ",active_" << i << ",x_" << i << ",g_" << i << ",d_" << i << ",rho_" << i
      << ",b_" << i << ",p_" << i << ",c_" << i << ",latency_" << i
      << ",throughput_" << i;
  h << ",r_e,case";
  return h.str();
}

Env::Step WirelessEnv::step(std::span<const double> raw_action,
                            std::mt19937_64& rng) {
  if (static_cast<int>(raw_action.size()) != action_dim())
    throw std::invalid_argument("WirelessEnv::step: bad action length");
  AllocationAction action = project_action(raw_action);
  StepOutcome out = env::step(state_, action, config_, rng);
  if (trace_) {
    std::ostringstream row;
    row.precision(17);
    row << state_.t;
    for (int i = 0; i < config_.n_users; ++i) {
      const auto& u = state_.users[i];
      row << ',' << (u.active ? 1 : 0) << ',' << u.position << ',' << u.channel_gain
          << ',' << u.demand << ',' << u.patience << ',' << action.bandwidth[i]
          << ',' << action.power[i] << ',' << action.compute[i] << ','
          << out.info.latencies[i] << ',' << out.info.throughputs[i];
    }
    row << ',' << out.reward << ','
        << (out.info.reward_case == RewardCase::NoFeedback ? 1 : 2);
    trace_->push_back(row.str());
  }
  state_ = out.next_state;
  Step s;
  s.observation = encode_observation(state_, config_);
  s.reward = out.reward;
  s.done = out.done;
  s.zero_feedback = out.info.reward_case == RewardCase::NoFeedback;
  return s;
}

std::vector<double> MountainCarEnv::reset(std::mt19937_64& rng) {
  state_ = car_reset(rng);
  steps_ = 0;
  return {state_.position, state_.velocity / kCarMaxVelocity};
}

Env::Step MountainCarEnv::step(std::span<const double> raw_action,
                               std::mt19937_64& rng) {
  (void)rng;
  if (raw_action.size() != 1)
    throw std::invalid_argument("MountainCarEnv::step: bad action length");
  const double force = std::clamp(raw_action[0], -1.0, 1.0);
  CarStepResult r = car_step(state_, force);
  state_ = r.next;
  steps_ += 1;
  Step s;
  s.observation = {state_.position, state_.velocity / kCarMaxVelocity};
  s.reward = r.reward;
  s.done = r.goal_reached || steps_ >= kCarMaxEpisodeSteps;
  s.zero_feedback = r.reward == 0.0;
  return s;
}

std::unique_ptr<Env> make_env(const std::string& name,
                              const WirelessConfig& wireless) {
  if (name == "meclatency") return std::make_unique<WirelessEnv>(wireless);
  if (name == "mountaincar") return std::make_unique<MountainCarEnv>();
  throw std::invalid_argument("make_env: unknown environment '" + name + "'");
}

}  // namespace drs::env
