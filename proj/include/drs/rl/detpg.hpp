#pragma once

#include <random>
#include <span>
#include <vector>

#include "drs/nn/mlp.hpp"
#include "drs/nn/optim.hpp"
#include "drs/rl/replay.hpp"

namespace drs::rl {

/// Shared deterministic-policy-gradient core. TD3 is the twin-critic,
/// delayed-actor, smoothed-target configuration; DDPG is the single-critic,
/// undelayed, noise-free one.
struct DetPgConfig {
  int obs_dim = 1;
  int action_dim = 1;
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double tau = 0.005;
  nn::AdamConfig adam{};
  bool twin_critics = true;
  int policy_delay = 2;
  double smoothing_std = 0.2;
  double smoothing_clip = 0.5;
};

DetPgConfig td3_config(int obs_dim, int action_dim);
DetPgConfig ddpg_config(int obs_dim, int action_dim);

struct DetPgAgent {
  DetPgConfig cfg;
  nn::MlpSpec actor_spec, critic_spec;
  nn::ParamSet actor, actor_target, q1, q1_target, q2, q2_target;
  long critic_updates = 0;
  long actor_updates = 0;
  long skipped_updates = 0;

  static DetPgAgent make(const DetPgConfig& cfg, std::mt19937_64& rng);
};

/// tanh(actor(s)), plus exploration noise (clipped back to [-1, 1]) when
/// explore_std > 0.
std::vector<double> detpg_select_action(const DetPgAgent& agent,
                                        std::span<const double> obs,
                                        std::mt19937_64& rng,
                                        double explore_std);

struct DetPgLosses {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  bool actor_updated = false;
};

/// Critic TD gradients into q1.grads (and q2.grads when twin); returns the
/// summed-over-critics mean squared TD error.
double detpg_critic_backward(DetPgAgent& agent,
                             std::span<const PolicyTransition* const> batch,
                             std::mt19937_64& rng);

/// Actor gradients of -mean Q1(s, pi(s)) into actor.grads, critics fixed.
double detpg_actor_backward(DetPgAgent& agent,
                            std::span<const PolicyTransition* const> batch);

/// One critic TD step; every policy_delay critic steps, one actor ascent
/// step on Q1 followed by all Polyak target moves.
DetPgLosses detpg_update(DetPgAgent& agent,
                         std::span<const PolicyTransition* const> batch,
                         std::mt19937_64& rng);

}  // namespace drs::rl
