#pragma once

#include <random>
#include <span>
#include <vector>

#include "drs/diffusion/generation.hpp"
#include "drs/nn/mlp.hpp"
#include "drs/nn/optim.hpp"

namespace drs::diffusion {

/// One shaper transition. cond = [observation, action] at the step the
/// generated reward was paid out; cond_next is the same pair one step later
/// (zero action on terminal steps, where the bootstrap is dropped anyway).
struct RewardTransition {
  std::vector<double> cond;
  double r_g = 0.0;
  double r_e = 0.0;
  std::vector<double> cond_next;
  bool done = false;
};

/// Scalar critic over (cond, generated reward). Abstract so tests can pin
/// the value function to a known closed form.
class RewardCritic {
 public:
  virtual ~RewardCritic() = default;
  virtual double value(std::span<const double> cond, double r) const = 0;
  virtual double grad_reward(std::span<const double> cond, double r) const = 0;
};

/// MLP-backed critic: input [cond, r] -> scalar.
class QNetworkCritic : public RewardCritic {
 public:
  QNetworkCritic() = default;
  QNetworkCritic(const nn::MlpSpec& spec, nn::ParamSet params)
      : spec_(spec), params_(std::move(params)) {}

  double value(std::span<const double> cond, double r) const override;
  double grad_reward(std::span<const double> cond, double r) const override;

  const nn::MlpSpec& spec() const { return spec_; }
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  static thread_local std::vector<double> input_;
  nn::MlpSpec spec_;
  nn::ParamSet params_;
};

struct EvaluationConfig {
  int cond_dim = 1;
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double tau = 0.005;
};

/// Critic pair (online + Polyak target) judging generated rewards.
struct EvaluationAgent {
  EvaluationConfig cfg;
  QNetworkCritic q;
  QNetworkCritic q_target;
  long skipped_updates = 0;

  static EvaluationAgent make(const EvaluationConfig& cfg, std::mt19937_64& rng);
  double q_value(std::span<const double> cond, double r) const {
    return q.value(cond, r);
  }
};

/// y = r_e + gamma * (1 - done) * target(cond_next, r_g_next).
double evaluation_td_target(const RewardTransition& t, double r_g_next,
                            const RewardCritic& target, double gamma);

/// One TD step on the online critic over a batch: loss = mean (y - Q)^2,
/// Adam update, then a Polyak move of the target. The next-step generated
/// reward is re-sampled from the current generation agent. Returns the
/// batch loss; skips the parameter update (counting it) on non-finite
/// gradients.
double evaluation_update(EvaluationAgent& eval, const GenerationAgent& gen,
                         const Schedule& schedule,
                         std::span<const RewardTransition> batch,
                         std::mt19937_64& rng, const nn::AdamConfig& adam);

/// One ascent step on the generation networks: loss = -mean Q(cond, r_g)
/// with r_g freshly sampled through the differentiable chain. Returns the
/// loss; skips (counting it) on non-finite gradients.
double generation_update(GenerationAgent& gen, const RewardCritic& critic,
                         const Schedule& schedule,
                         std::span<const std::vector<double>> conds,
                         std::mt19937_64& rng, const nn::AdamConfig& adam);

}  // namespace drs::diffusion
