#pragma once

#include <random>
#include <span>
#include <vector>

#include "drs/nn/mlp.hpp"
#include "drs/nn/optim.hpp"

namespace drs::rl {

struct ReinforceConfig {
  int obs_dim = 1;
  int action_dim = 1;
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  bool mean_baseline = true;
  nn::AdamConfig adam{};
};

/// Squashed-Gaussian policy trained on complete episodes with the score
/// function estimator; no critics, no replay.
struct ReinforceAgent {
  ReinforceConfig cfg;
  nn::MlpSpec actor_spec;
  nn::ParamSet actor;
  long skipped_updates = 0;

  static ReinforceAgent make(const ReinforceConfig& cfg, std::mt19937_64& rng);
};

/// One trajectory step: the pre-tanh draw is stored so the log-density can
/// be re-evaluated against the current parameters.
struct EpisodeStep {
  std::vector<double> s;
  std::vector<double> pre_tanh;
  double r_total = 0.0;
};

/// Samples an action, returning both the squashed action and its pre-tanh
/// value for the episode record.
struct ReinforceAction {
  std::vector<double> action;
  std::vector<double> pre_tanh;
};
ReinforceAction reinforce_select_action(const ReinforceAgent& agent,
                                        std::span<const double> obs,
                                        std::mt19937_64& rng);

/// Discounted returns G_t = sum_{t' >= t} gamma^{t'-t} r_{t'}.
std::vector<double> discounted_returns(std::span<const EpisodeStep> episode,
                                       double gamma);

/// Accumulates score-function gradients of
/// loss = -sum_t log pi(a_t | s_t) (G_t - b) into actor.grads; b = mean(G)
/// when the baseline flag is set. Rejects empty episodes.
double reinforce_backward(ReinforceAgent& agent,
                          std::span<const EpisodeStep> episode);

/// Backward pass plus one Adam step.
double reinforce_update(ReinforceAgent& agent,
                        std::span<const EpisodeStep> episode);

}  // namespace drs::rl
