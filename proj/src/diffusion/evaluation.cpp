#include "drs/diffusion/evaluation.hpp"

#include <stdexcept>

namespace drs::diffusion {

thread_local std::vector<double> QNetworkCritic::input_;

double QNetworkCritic::value(std::span<const double> cond, double r) const {
  input_.assign(cond.begin(), cond.end());
  input_.push_back(r);
  if (static_cast<int>(input_.size()) != spec_.input_dim)
    throw std::invalid_argument("QNetworkCritic: cond length mismatch");
  return nn::mlp_forward(spec_, params_, input_)[0];
}

double QNetworkCritic::grad_reward(std::span<const double> cond, double r) const {
  input_.assign(cond.begin(), cond.end());
  input_.push_back(r);
  if (static_cast<int>(input_.size()) != spec_.input_dim)
    throw std::invalid_argument("QNetworkCritic: cond length mismatch");
  thread_local nn::MlpCache cache;
  thread_local std::vector<double> grad_input;
  grad_input.assign(input_.size(), 0.0);
  nn::mlp_forward_cached(spec_, params_, input_, cache);
  const double one = 1.0;
  nn::mlp_backward(spec_, params_, cache, std::span<const double>(&one, 1), {},
                   grad_input);
  return grad_input.back();
}

EvaluationAgent EvaluationAgent::make(const EvaluationConfig& cfg,
                                      std::mt19937_64& rng) {
  if (cfg.cond_dim < 1) throw std::invalid_argument("EvaluationAgent: bad cond_dim");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0))
    throw std::invalid_argument("EvaluationAgent: gamma outside [0, 1]");
  EvaluationAgent a;
  a.cfg = cfg;
  nn::MlpSpec spec{cfg.cond_dim + 1, cfg.hidden, 1, nn::Activation::Relu};
  auto params = nn::init_params(spec, rng);
  a.q = QNetworkCritic(spec, params);
  a.q_target = QNetworkCritic(spec, std::move(params));
  return a;
}

double evaluation_td_target(const RewardTransition& t, double r_g_next,
                            const RewardCritic& target, double gamma) {
  if (t.done) return t.r_e;
  return t.r_e + gamma * target.value(t.cond_next, r_g_next);
}

double evaluation_update(EvaluationAgent& eval, const GenerationAgent& gen,
                         const Schedule& schedule,
                         std::span<const RewardTransition> batch,
                         std::mt19937_64& rng, const nn::AdamConfig& adam) {
  if (batch.empty()) throw std::invalid_argument("evaluation_update: empty batch");
  const auto& spec = eval.q.spec();
  auto& params = eval.q.params();
  std::vector<double> input(spec.input_dim);
  nn::MlpCache cache;
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto& t : batch) {
    // target side: regenerate the next-step reward deterministically so the
    // TD target depends only on the transition and the current networks
    double r_g_next = 0.0;
    if (!t.done)
      r_g_next = generate_reward_cond(gen, schedule, t.cond_next, rng, false);
    const double y = evaluation_td_target(t, r_g_next, eval.q_target,
                                          eval.cfg.gamma);

    std::copy(t.cond.begin(), t.cond.end(), input.begin());
    input.back() = t.r_g;
    nn::mlp_forward_cached(spec, params, input, cache);
    const double q = cache.output()[0];
    const double err = q - y;
    loss += err * err * scale;
    const double up = 2.0 * err * scale;
    nn::mlp_backward(spec, params, cache, std::span<const double>(&up, 1),
                     &params, {});
  }
  if (nn::adam_step(params, adam)) {
    nn::soft_update(eval.q_target.params(), params, eval.cfg.tau);
  } else {
    params.zero_grads();
    eval.skipped_updates += 1;
  }
  return loss;
}

double generation_update(GenerationAgent& gen, const RewardCritic& critic,
                         const Schedule& schedule,
                         std::span<const std::vector<double>> conds,
                         std::mt19937_64& rng, const nn::AdamConfig& adam) {
  if (conds.empty()) throw std::invalid_argument("generation_update: empty batch");
  ChainCache cache;
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(conds.size());
  for (const auto& cond : conds) {
    const double r_g = generate_reward_cond(gen, schedule, cond, rng, true, &cache);
    loss -= critic.value(cond, r_g) * scale;
    const double dq_dr = critic.grad_reward(cond, r_g);
    generation_backward(gen, schedule, cache, -dq_dr * scale);
  }
  const bool ok = nn::all_finite(gen.denoiser.grads) &&
                  nn::all_finite(gen.head_mu.grads) &&
                  nn::all_finite(gen.head_sigma.grads);
  if (ok) {
    nn::adam_step(gen.denoiser, adam);
    nn::adam_step(gen.head_mu, adam);
    nn::adam_step(gen.head_sigma, adam);
  } else {
    gen.denoiser.zero_grads();
    gen.head_mu.zero_grads();
    gen.head_sigma.zero_grads();
    gen.skipped_updates += 1;
  }
  return loss;
}

}  // namespace drs::diffusion
