#include "drs/rl/sac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drs/nn/gaussian.hpp"

namespace drs::rl {

namespace {

void check_batch(std::span<const PolicyTransition* const> batch) {
  if (batch.empty()) throw std::invalid_argument("sac: empty batch");
}

}  // namespace

SacAgent SacAgent::make(const SacConfig& cfg, std::mt19937_64& rng) {
  if (cfg.obs_dim < 1 || cfg.action_dim < 1)
    throw std::invalid_argument("SacAgent: bad dims");
  if (!(cfg.alpha_ent > 0.0) && !cfg.auto_tune_alpha)
    throw std::invalid_argument("SacAgent: alpha_ent must be > 0");
  SacAgent a;
  a.cfg = cfg;
  a.actor_spec = {cfg.obs_dim, cfg.hidden, 2 * cfg.action_dim,
                  nn::Activation::Relu};
  a.critic_spec = {cfg.obs_dim + cfg.action_dim, cfg.hidden, 1,
                   nn::Activation::Relu};
  a.actor = nn::init_params(a.actor_spec, rng);
  a.q1 = nn::init_params(a.critic_spec, rng);
  a.q2 = nn::init_params(a.critic_spec, rng);
  a.q1_target = a.q1;
  a.q2_target = a.q2;
  a.log_alpha = std::log(cfg.alpha_ent > 0.0 ? cfg.alpha_ent : 0.2);
  return a;
}

double SacAgent::alpha() const {
  return cfg.auto_tune_alpha ? std::exp(log_alpha) : cfg.alpha_ent;
}

std::vector<double> sac_select_action(const SacAgent& agent,
                                      std::span<const double> obs,
                                      std::mt19937_64& rng, bool train) {
  const int d = agent.cfg.action_dim;
  auto out = nn::mlp_forward(agent.actor_spec, agent.actor, obs);
  std::span<const double> mean(out.data(), d);
  std::span<const double> log_std(out.data() + d, d);
  if (!train) {
    std::vector<double> a(d);
    for (int j = 0; j < d; ++j) a[j] = std::tanh(mean[j]);
    return a;
  }
  std::normal_distribution<double> normal(0, 1);
  std::vector<double> noise(d);
  for (auto& n : noise) n = normal(rng);
  return nn::gaussian_tanh_sample(mean, log_std, noise, 1.0, 0.0).sample;
}

double sac_critic_backward(SacAgent& agent,
                           std::span<const PolicyTransition* const> batch,
                           std::mt19937_64& rng) {
  check_batch(batch);
  const auto& cfg = agent.cfg;
  const int d = cfg.action_dim;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double alpha = agent.alpha();

  std::normal_distribution<double> normal(0, 1);
  std::vector<double> noise(d), input(cfg.obs_dim + d);
  nn::MlpCache c1, c2;
  double loss = 0.0;
  for (const auto* t : batch) {
    // target action from the current policy at s'
    auto head = nn::mlp_forward(agent.actor_spec, agent.actor, t->s_next);
    for (auto& n : noise) n = normal(rng);
    auto g = nn::gaussian_tanh_sample({head.data(), static_cast<size_t>(d)},
                                      {head.data() + d, static_cast<size_t>(d)},
                                      noise, 1.0, 0.0);
    std::copy(t->s_next.begin(), t->s_next.end(), input.begin());
    std::copy(g.sample.begin(), g.sample.end(), input.begin() + cfg.obs_dim);
    const double q1t = nn::mlp_forward(agent.critic_spec, agent.q1_target, input)[0];
    const double q2t = nn::mlp_forward(agent.critic_spec, agent.q2_target, input)[0];
    const double not_done = t->done ? 0.0 : 1.0;
    const double y = t->r_total +
                     cfg.gamma * not_done * (std::min(q1t, q2t) - alpha * g.log_prob);

    std::copy(t->s.begin(), t->s.end(), input.begin());
    std::copy(t->a.begin(), t->a.end(), input.begin() + cfg.obs_dim);
    nn::mlp_forward_cached(agent.critic_spec, agent.q1, input, c1);
    nn::mlp_forward_cached(agent.critic_spec, agent.q2, input, c2);
    const double e1 = c1.output()[0] - y;
    const double e2 = c2.output()[0] - y;
    loss += 0.5 * (e1 * e1 + e2 * e2) * scale;
    const double u1 = e1 * scale, u2 = e2 * scale;
    nn::mlp_backward(agent.critic_spec, agent.q1, c1,
                     std::span<const double>(&u1, 1), &agent.q1, {});
    nn::mlp_backward(agent.critic_spec, agent.q2, c2,
                     std::span<const double>(&u2, 1), &agent.q2, {});
  }
  return loss;
}

double sac_critic_update(SacAgent& agent,
                         std::span<const PolicyTransition* const> batch,
                         std::mt19937_64& rng) {
  const double loss = sac_critic_backward(agent, batch, rng);
  const auto& cfg = agent.cfg;
  if (nn::all_finite(agent.q1.grads) && nn::all_finite(agent.q2.grads)) {
    nn::adam_step(agent.q1, cfg.adam);
    nn::adam_step(agent.q2, cfg.adam);
    nn::soft_update(agent.q1_target, agent.q1, cfg.tau);
    nn::soft_update(agent.q2_target, agent.q2, cfg.tau);
  } else {
    agent.q1.zero_grads();
    agent.q2.zero_grads();
    agent.skipped_updates += 1;
  }
  return loss;
}

double sac_actor_backward(SacAgent& agent,
                          std::span<const PolicyTransition* const> batch,
                          std::mt19937_64& rng, double* mean_log_prob_out) {
  check_batch(batch);
  const auto& cfg = agent.cfg;
  const int d = cfg.action_dim;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double alpha = agent.alpha();

  std::normal_distribution<double> normal(0, 1);
  std::vector<double> noise(d), input(cfg.obs_dim + d);
  std::vector<double> grad_in(cfg.obs_dim + d), upstream(2 * d);
  nn::MlpCache actor_cache, c1, c2;
  double loss = 0.0, mean_log_prob = 0.0;
  for (const auto* t : batch) {
    nn::mlp_forward_cached(agent.actor_spec, agent.actor, t->s, actor_cache);
    auto head = actor_cache.output();
    for (auto& n : noise) n = normal(rng);
    auto g = nn::gaussian_tanh_sample({head.data(), static_cast<size_t>(d)},
                                      {head.data() + d, static_cast<size_t>(d)},
                                      noise, 1.0, 0.0);
    std::copy(t->s.begin(), t->s.end(), input.begin());
    std::copy(g.sample.begin(), g.sample.end(), input.begin() + cfg.obs_dim);
    nn::mlp_forward_cached(agent.critic_spec, agent.q1, input, c1);
    nn::mlp_forward_cached(agent.critic_spec, agent.q2, input, c2);
    const double v1 = c1.output()[0], v2 = c2.output()[0];
    loss += (alpha * g.log_prob - std::min(v1, v2)) * scale;
    mean_log_prob += g.log_prob * scale;

    // d(-min)/d(action) through the selected critic; params held fixed
    const double up = -scale;
    const bool first = v1 <= v2;
    nn::mlp_backward(agent.critic_spec, first ? agent.q1 : agent.q2,
                     first ? c1 : c2, std::span<const double>(&up, 1), {},
                     grad_in);

    for (int j = 0; j < d; ++j) {
      const double a_j = g.sample[j];
      const double sigma = std::exp(g.log_std[j]);
      const double da = grad_in[cfg.obs_dim + j];
      const double du = scale * alpha * 2.0 * a_j + da * (1.0 - a_j * a_j);
      const double raw = head[d + j];
      const double clip = (raw > nn::kLogStdMin && raw < nn::kLogStdMax) ? 1.0 : 0.0;
      upstream[j] = du;
      upstream[d + j] = clip * (du * sigma * noise[j] - scale * alpha);
    }
    nn::mlp_backward(agent.actor_spec, agent.actor, actor_cache, upstream,
                     &agent.actor, {});
  }
  if (mean_log_prob_out) *mean_log_prob_out = mean_log_prob;
  return loss;
}

double sac_actor_update(SacAgent& agent,
                        std::span<const PolicyTransition* const> batch,
                        std::mt19937_64& rng) {
  const auto& cfg = agent.cfg;
  const int d = cfg.action_dim;
  double mean_log_prob = 0.0;
  const double loss = sac_actor_backward(agent, batch, rng, &mean_log_prob);
  if (nn::all_finite(agent.actor.grads)) {
    nn::adam_step(agent.actor, cfg.adam);
  } else {
    agent.actor.zero_grads();
    agent.skipped_updates += 1;
  }

  if (cfg.auto_tune_alpha) {
    const double target_entropy = -static_cast<double>(d);
    const double grad = -std::exp(agent.log_alpha) * (mean_log_prob + target_entropy);
    if (std::isfinite(grad)) agent.log_alpha -= cfg.alpha_lr * grad;
  }
  return loss;
}

}  // namespace drs::rl
