#pragma once

#include <random>
#include <span>
#include <vector>

#include "drs/nn/mlp.hpp"
#include "drs/nn/optim.hpp"
#include "drs/rl/replay.hpp"

namespace drs::rl {

struct SacConfig {
  int obs_dim = 1;
  int action_dim = 1;
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double tau = 0.005;
  double alpha_ent = 0.2;
  bool auto_tune_alpha = false;  // targets entropy -action_dim
  nn::AdamConfig adam{};         // shared by actor and critics
  double alpha_lr = 3e-4;
};

/// Soft actor-critic: squashed-Gaussian actor (outputs mean then log-std
/// per action dim) and twin Q critics with Polyak targets.
struct SacAgent {
  SacConfig cfg;
  nn::MlpSpec actor_spec, critic_spec;
  nn::ParamSet actor, q1, q2, q1_target, q2_target;
  double log_alpha = 0.0;
  long skipped_updates = 0;

  static SacAgent make(const SacConfig& cfg, std::mt19937_64& rng);
  double alpha() const;
};

/// Train mode samples from the squashed Gaussian; eval mode returns
/// tanh(mean). Output in [-1, 1]^action_dim either way.
std::vector<double> sac_select_action(const SacAgent& agent,
                                      std::span<const double> obs,
                                      std::mt19937_64& rng, bool train);

/// Accumulates the twin-critic TD gradients into q1.grads / q2.grads and
/// returns the loss: y = r + gamma (1 - done)(min Q' - alpha log pi),
/// loss = mean over the batch of 0.5 [(Q1 - y)^2 + (Q2 - y)^2].
double sac_critic_backward(SacAgent& agent,
                           std::span<const PolicyTransition* const> batch,
                           std::mt19937_64& rng);

/// Backward pass plus Adam on both critics and a Polyak move of the
/// targets. Skips (counting it) on non-finite grads.
double sac_critic_update(SacAgent& agent,
                         std::span<const PolicyTransition* const> batch,
                         std::mt19937_64& rng);

/// Reparameterized actor gradients into actor.grads; critics held fixed.
/// loss = mean(alpha log pi - min(Q1, Q2)). mean_log_prob (optional out)
/// feeds the alpha auto-tuner.
double sac_actor_backward(SacAgent& agent,
                          std::span<const PolicyTransition* const> batch,
                          std::mt19937_64& rng,
                          double* mean_log_prob = nullptr);

/// Backward pass plus Adam on the actor; auto-tunes alpha when enabled.
double sac_actor_update(SacAgent& agent,
                        std::span<const PolicyTransition* const> batch,
                        std::mt19937_64& rng);

}  // namespace drs::rl
