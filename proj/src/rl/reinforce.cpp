#include "drs/rl/reinforce.hpp"

#include <cmath>
#include <stdexcept>

#include "drs/nn/gaussian.hpp"

namespace drs::rl {

ReinforceAgent ReinforceAgent::make(const ReinforceConfig& cfg,
                                    std::mt19937_64& rng) {
  if (cfg.obs_dim < 1 || cfg.action_dim < 1)
    throw std::invalid_argument("ReinforceAgent: bad dims");
  ReinforceAgent a;
  a.cfg = cfg;
  a.actor_spec = {cfg.obs_dim, cfg.hidden, 2 * cfg.action_dim,
                  nn::Activation::Relu};
  a.actor = nn::init_params(a.actor_spec, rng);
  return a;
}

ReinforceAction reinforce_select_action(const ReinforceAgent& agent,
                                        std::span<const double> obs,
                                        std::mt19937_64& rng) {
  const int d = agent.cfg.action_dim;
  auto out = nn::mlp_forward(agent.actor_spec, agent.actor, obs);
  std::normal_distribution<double> normal(0, 1);
  std::vector<double> noise(d);
  for (auto& n : noise) n = normal(rng);
  auto g = nn::gaussian_tanh_sample({out.data(), static_cast<size_t>(d)},
                                    {out.data() + d, static_cast<size_t>(d)},
                                    noise, 1.0, 0.0);
  return {std::move(g.sample), std::move(g.pre_tanh)};
}

std::vector<double> discounted_returns(std::span<const EpisodeStep> episode,
                                       double gamma) {
  std::vector<double> g(episode.size());
  double acc = 0.0;
  for (int t = static_cast<int>(episode.size()) - 1; t >= 0; --t) {
    acc = episode[t].r_total + gamma * acc;
    g[t] = acc;
  }
  return g;
}

double reinforce_backward(ReinforceAgent& agent,
                          std::span<const EpisodeStep> episode) {
  if (episode.empty())
    throw std::invalid_argument("reinforce_update: empty episode");
  const auto& cfg = agent.cfg;
  const int d = cfg.action_dim;

  auto g = discounted_returns(episode, cfg.gamma);
  double baseline = 0.0;
  if (cfg.mean_baseline) {
    for (double v : g) baseline += v;
    baseline /= static_cast<double>(g.size());
  }

  nn::MlpCache cache;
  std::vector<double> upstream(2 * d), log_std(d);
  double loss = 0.0;
  for (size_t t = 0; t < episode.size(); ++t) {
    const auto& step = episode[t];
    nn::mlp_forward_cached(agent.actor_spec, agent.actor, step.s, cache);
    auto head = cache.output();
    for (int j = 0; j < d; ++j) log_std[j] = nn::clip_log_std(head[d + j]);
    const double logp = nn::gaussian_tanh_log_prob(
        {head.data(), static_cast<size_t>(d)}, log_std, step.pre_tanh, 1.0);
    const double w = g[t] - baseline;
    loss -= logp * w;
    for (int j = 0; j < d; ++j) {
      const double z = (step.pre_tanh[j] - head[j]) / std::exp(log_std[j]);
      const double clip = (head[d + j] > nn::kLogStdMin &&
                           head[d + j] < nn::kLogStdMax)
                              ? 1.0
                              : 0.0;
      // d(-logp)/dmu and d(-logp)/dlog_std, weighted by the return
      upstream[j] = -w * z / std::exp(log_std[j]);
      upstream[d + j] = -w * clip * (-1.0 + z * z);
    }
    nn::mlp_backward(agent.actor_spec, agent.actor, cache, upstream,
                     &agent.actor, {});
  }
  return loss;
}

double reinforce_update(ReinforceAgent& agent,
                        std::span<const EpisodeStep> episode) {
  const double loss = reinforce_backward(agent, episode);
  const auto& cfg = agent.cfg;
  if (nn::all_finite(agent.actor.grads)) {
    nn::adam_step(agent.actor, cfg.adam);
  } else {
    agent.actor.zero_grads();
    agent.skipped_updates += 1;
  }
  return loss;
}

}  // namespace drs::rl
