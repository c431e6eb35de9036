#include "drs/rl/detpg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drs::rl {

DetPgConfig td3_config(int obs_dim, int action_dim) {
  DetPgConfig c;
  c.obs_dim = obs_dim;
  c.action_dim = action_dim;
  return c;
}

DetPgConfig ddpg_config(int obs_dim, int action_dim) {
  DetPgConfig c;
  c.obs_dim = obs_dim;
  c.action_dim = action_dim;
  c.twin_critics = false;
  c.policy_delay = 1;
  c.smoothing_std = 0.0;
  c.smoothing_clip = 0.0;
  return c;
}

DetPgAgent DetPgAgent::make(const DetPgConfig& cfg, std::mt19937_64& rng) {
  if (cfg.obs_dim < 1 || cfg.action_dim < 1 || cfg.policy_delay < 1)
    throw std::invalid_argument("DetPgAgent: bad config");
  DetPgAgent a;
  a.cfg = cfg;
  a.actor_spec = {cfg.obs_dim, cfg.hidden, cfg.action_dim, nn::Activation::Relu};
  a.critic_spec = {cfg.obs_dim + cfg.action_dim, cfg.hidden, 1,
                   nn::Activation::Relu};
  a.actor = nn::init_params(a.actor_spec, rng);
  a.actor_target = a.actor;
  a.q1 = nn::init_params(a.critic_spec, rng);
  a.q1_target = a.q1;
  if (cfg.twin_critics) {
    a.q2 = nn::init_params(a.critic_spec, rng);
    a.q2_target = a.q2;
  }
  return a;
}

std::vector<double> detpg_select_action(const DetPgAgent& agent,
                                        std::span<const double> obs,
                                        std::mt19937_64& rng,
                                        double explore_std) {
  auto pre = nn::mlp_forward(agent.actor_spec, agent.actor, obs);
  std::normal_distribution<double> normal(0, 1);
  for (auto& v : pre) {
    v = std::tanh(v);
    if (explore_std > 0.0)
      v = std::clamp(v + explore_std * normal(rng), -1.0, 1.0);
  }
  return pre;
}

double detpg_critic_backward(DetPgAgent& agent,
                             std::span<const PolicyTransition* const> batch,
                             std::mt19937_64& rng) {
  if (batch.empty()) throw std::invalid_argument("detpg: empty batch");
  const auto& cfg = agent.cfg;
  const int d = cfg.action_dim;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;

  std::normal_distribution<double> normal(0, 1);
  std::vector<double> input(cfg.obs_dim + d);
  nn::MlpCache c1, c2;
  for (const auto* t : batch) {
    auto a_next = nn::mlp_forward(agent.actor_spec, agent.actor_target, t->s_next);
    for (auto& v : a_next) {
      v = std::tanh(v);
      if (cfg.smoothing_std > 0.0) {
        const double eps = std::clamp(cfg.smoothing_std * normal(rng),
                                      -cfg.smoothing_clip, cfg.smoothing_clip);
        v = std::clamp(v + eps, -1.0, 1.0);
      }
    }
    std::copy(t->s_next.begin(), t->s_next.end(), input.begin());
    std::copy(a_next.begin(), a_next.end(), input.begin() + cfg.obs_dim);
    double qt = nn::mlp_forward(agent.critic_spec, agent.q1_target, input)[0];
    if (cfg.twin_critics)
      qt = std::min(qt,
                    nn::mlp_forward(agent.critic_spec, agent.q2_target, input)[0]);
    const double y = t->r_total + cfg.gamma * (t->done ? 0.0 : 1.0) * qt;

    std::copy(t->s.begin(), t->s.end(), input.begin());
    std::copy(t->a.begin(), t->a.end(), input.begin() + cfg.obs_dim);
    nn::mlp_forward_cached(agent.critic_spec, agent.q1, input, c1);
    const double e1 = c1.output()[0] - y;
    loss += e1 * e1 * scale;
    const double u1 = 2.0 * e1 * scale;
    nn::mlp_backward(agent.critic_spec, agent.q1, c1,
                     std::span<const double>(&u1, 1), &agent.q1, {});
    if (cfg.twin_critics) {
      nn::mlp_forward_cached(agent.critic_spec, agent.q2, input, c2);
      const double e2 = c2.output()[0] - y;
      loss += e2 * e2 * scale;
      const double u2 = 2.0 * e2 * scale;
      nn::mlp_backward(agent.critic_spec, agent.q2, c2,
                       std::span<const double>(&u2, 1), &agent.q2, {});
    }
  }
  return loss;
}

double detpg_actor_backward(DetPgAgent& agent,
                            std::span<const PolicyTransition* const> batch) {
  if (batch.empty()) throw std::invalid_argument("detpg: empty batch");
  const auto& cfg = agent.cfg;
  const int d = cfg.action_dim;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  nn::MlpCache actor_cache, c1;
  std::vector<double> input(cfg.obs_dim + d);
  std::vector<double> grad_in(cfg.obs_dim + d), upstream(d);
  for (const auto* t : batch) {
    nn::mlp_forward_cached(agent.actor_spec, agent.actor, t->s, actor_cache);
    auto pre = actor_cache.output();
    std::copy(t->s.begin(), t->s.end(), input.begin());
    for (int j = 0; j < d; ++j) input[cfg.obs_dim + j] = std::tanh(pre[j]);
    nn::mlp_forward_cached(agent.critic_spec, agent.q1, input, c1);
    loss -= c1.output()[0] * scale;
    const double up = -scale;
    nn::mlp_backward(agent.critic_spec, agent.q1, c1,
                     std::span<const double>(&up, 1), {}, grad_in);
    for (int j = 0; j < d; ++j) {
      const double a_j = input[cfg.obs_dim + j];
      upstream[j] = grad_in[cfg.obs_dim + j] * (1.0 - a_j * a_j);
    }
    nn::mlp_backward(agent.actor_spec, agent.actor, actor_cache, upstream,
                     &agent.actor, {});
  }
  return loss;
}

DetPgLosses detpg_update(DetPgAgent& agent,
                         std::span<const PolicyTransition* const> batch,
                         std::mt19937_64& rng) {
  const auto& cfg = agent.cfg;
  DetPgLosses out;
  out.critic_loss = detpg_critic_backward(agent, batch, rng);
  const bool ok = nn::all_finite(agent.q1.grads) &&
                  (!cfg.twin_critics || nn::all_finite(agent.q2.grads));
  if (ok) {
    nn::adam_step(agent.q1, cfg.adam);
    if (cfg.twin_critics) nn::adam_step(agent.q2, cfg.adam);
  } else {
    agent.q1.zero_grads();
    if (cfg.twin_critics) agent.q2.zero_grads();
    agent.skipped_updates += 1;
  }
  agent.critic_updates += 1;

  if (agent.critic_updates % cfg.policy_delay != 0) return out;

  out.actor_loss = detpg_actor_backward(agent, batch);
  if (nn::all_finite(agent.actor.grads)) {
    nn::adam_step(agent.actor, cfg.adam);
  } else {
    agent.actor.zero_grads();
    agent.skipped_updates += 1;
  }
  agent.actor_updates += 1;
  out.actor_updated = true;

  nn::soft_update(agent.actor_target, agent.actor, cfg.tau);
  nn::soft_update(agent.q1_target, agent.q1, cfg.tau);
  if (cfg.twin_critics) nn::soft_update(agent.q2_target, agent.q2, cfg.tau);
  return out;
}

}  // namespace drs::rl
