#include "drs/run/gradcheck.hpp"

#include <algorithm>
#include <random>

#include "drs/diffusion/evaluation.hpp"
#include "drs/diffusion/generation.hpp"
#include "drs/diffusion/schedule.hpp"
#include "drs/nn/grad_check.hpp"
#include "drs/rl/detpg.hpp"
#include "drs/rl/reinforce.hpp"
#include "drs/rl/sac.hpp"
#include "drs/run/rng.hpp"

namespace drs::run {

namespace {

constexpr double kTol = 1e-4;
constexpr double kChainTol = 1e-3;  // full reverse chain compounds rounding
constexpr double kH = 1e-6;

rl::PolicyTransition random_transition(std::mt19937_64& rng, int obs_dim,
                                       int action_dim) {
  std::uniform_real_distribution<double> u(-1, 1);
  rl::PolicyTransition t;
  t.s.resize(obs_dim);
  t.a.resize(action_dim);
  t.s_next.resize(obs_dim);
  for (auto& v : t.s) v = u(rng);
  for (auto& v : t.a) v = u(rng);
  for (auto& v : t.s_next) v = u(rng);
  t.r_total = u(rng);
  t.done = false;
  return t;
}

std::vector<const rl::PolicyTransition*> ptrs(
    const std::vector<rl::PolicyTransition>& v) {
  std::vector<const rl::PolicyTransition*> p;
  for (const auto& t : v) p.push_back(&t);
  return p;
}

void check_sac(std::vector<GradCheckResult>& out, uint64_t seed) {
  rl::SacConfig cfg;
  cfg.obs_dim = 3;
  cfg.action_dim = 2;
  cfg.hidden = {8, 8};
  std::mt19937_64 rng(mix_seed(seed, 101));
  auto agent = rl::SacAgent::make(cfg, rng);
  agent.actor_spec.activation = nn::Activation::Tanh;
  agent.critic_spec.activation = nn::Activation::Tanh;
  std::vector<rl::PolicyTransition> ts{random_transition(rng, 3, 2),
                                       random_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  const uint64_t noise_seed = mix_seed(seed, 102);

  auto critic_loss = [&]() {
    rl::SacAgent tmp = agent;
    std::mt19937_64 r(noise_seed);
    return rl::sac_critic_backward(tmp, batch, r);
  };
  agent.q1.zero_grads();
  agent.q2.zero_grads();
  {
    std::mt19937_64 r(noise_seed);
    rl::sac_critic_backward(agent, batch, r);
  }
  out.push_back({"sac_critic_q1",
                 nn::finite_diff_check_loss(agent.q1, critic_loss, kH), kTol});
  out.push_back({"sac_critic_q2",
                 nn::finite_diff_check_loss(agent.q2, critic_loss, kH), kTol});

  auto actor_loss = [&]() {
    rl::SacAgent tmp = agent;
    std::mt19937_64 r(noise_seed);
    return rl::sac_actor_backward(tmp, batch, r);
  };
  agent.actor.zero_grads();
  {
    std::mt19937_64 r(noise_seed);
    rl::sac_actor_backward(agent, batch, r);
  }
  out.push_back({"sac_actor",
                 nn::finite_diff_check_loss(agent.actor, actor_loss, kH),
                 kTol});
}

void check_detpg(std::vector<GradCheckResult>& out, uint64_t seed,
                 bool twin) {
  auto cfg = twin ? rl::td3_config(3, 2) : rl::ddpg_config(3, 2);
  cfg.hidden = {8, 8};
  std::mt19937_64 rng(mix_seed(seed, twin ? 201 : 301));
  auto agent = rl::DetPgAgent::make(cfg, rng);
  agent.actor_spec.activation = nn::Activation::Tanh;
  agent.critic_spec.activation = nn::Activation::Tanh;
  std::vector<rl::PolicyTransition> ts{random_transition(rng, 3, 2),
                                       random_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  const uint64_t noise_seed = mix_seed(seed, twin ? 202 : 302);
  const std::string tag = twin ? "td3" : "ddpg";

  auto critic_loss = [&]() {
    rl::DetPgAgent tmp = agent;
    std::mt19937_64 r(noise_seed);
    return rl::detpg_critic_backward(tmp, batch, r);
  };
  agent.q1.zero_grads();
  if (twin) agent.q2.zero_grads();
  {
    std::mt19937_64 r(noise_seed);
    rl::detpg_critic_backward(agent, batch, r);
  }
  out.push_back({tag + "_critic_q1",
                 nn::finite_diff_check_loss(agent.q1, critic_loss, kH), kTol});
  if (twin)
    out.push_back({tag + "_critic_q2",
                   nn::finite_diff_check_loss(agent.q2, critic_loss, kH),
                   kTol});

  auto actor_loss = [&]() {
    rl::DetPgAgent tmp = agent;
    return rl::detpg_actor_backward(tmp, batch);
  };
  agent.actor.zero_grads();
  rl::detpg_actor_backward(agent, batch);
  out.push_back({tag + "_actor",
                 nn::finite_diff_check_loss(agent.actor, actor_loss, kH),
                 kTol});
}

void check_reinforce(std::vector<GradCheckResult>& out, uint64_t seed) {
  rl::ReinforceConfig cfg;
  cfg.obs_dim = 2;
  cfg.action_dim = 2;
  cfg.hidden = {8, 8};
  std::mt19937_64 rng(mix_seed(seed, 401));
  auto agent = rl::ReinforceAgent::make(cfg, rng);
  agent.actor_spec.activation = nn::Activation::Tanh;
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<rl::EpisodeStep> episode(6);
  for (auto& s : episode) {
    s.s = {u(rng), u(rng)};
    s.pre_tanh = {u(rng), u(rng)};
    s.r_total = u(rng);
  }
  auto loss = [&]() {
    rl::ReinforceAgent tmp = agent;
    return rl::reinforce_backward(tmp, episode);
  };
  agent.actor.zero_grads();
  rl::reinforce_backward(agent, episode);
  out.push_back({"reinforce",
                 nn::finite_diff_check_loss(agent.actor, loss, kH), kTol});
}

void check_generation(std::vector<GradCheckResult>& out, uint64_t seed) {
  diffusion::GenerationConfig cfg;
  cfg.cond_dim = 2;
  cfg.latent_dim = 2;
  cfg.k_embed_dim = 2;
  cfg.denoiser_hidden = {8, 8};
  cfg.head_hidden = {8};
  std::mt19937_64 rng(mix_seed(seed, 501));
  auto agent = diffusion::GenerationAgent::make(cfg, rng);
  agent.denoiser_spec.activation = nn::Activation::Tanh;
  agent.mu_spec.activation = nn::Activation::Tanh;
  agent.sigma_spec.activation = nn::Activation::Tanh;
  auto s = diffusion::Schedule::linear(3, 1e-2, 0.1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> cond{u(rng), u(rng)};
  const uint64_t noise_seed = mix_seed(seed, 502);

  auto loss = [&]() {
    std::mt19937_64 r(noise_seed);
    return diffusion::generate_reward_cond(agent, s, cond, r, true);
  };
  diffusion::ChainCache cache;
  {
    std::mt19937_64 r(noise_seed);
    diffusion::generate_reward_cond(agent, s, cond, r, true, &cache);
  }
  agent.denoiser.zero_grads();
  agent.head_mu.zero_grads();
  agent.head_sigma.zero_grads();
  diffusion::generation_backward(agent, s, cache, 1.0);
  out.push_back({"dress_generation_denoiser",
                 nn::finite_diff_check_loss(agent.denoiser, loss, kH),
                 kChainTol});
  out.push_back({"dress_generation_head_mu",
                 nn::finite_diff_check_loss(agent.head_mu, loss, kH),
                 kChainTol});
  out.push_back({"dress_generation_head_sigma",
                 nn::finite_diff_check_loss(agent.head_sigma, loss, kH),
                 kChainTol});
}

void check_evaluation(std::vector<GradCheckResult>& out, uint64_t seed) {
  diffusion::EvaluationConfig ecfg;
  ecfg.cond_dim = 2;
  ecfg.hidden = {8, 8};
  std::mt19937_64 rng(mix_seed(seed, 601));
  auto eval = diffusion::EvaluationAgent::make(ecfg, rng);
  const_cast<nn::MlpSpec&>(eval.q.spec()).activation = nn::Activation::Tanh;
  const_cast<nn::MlpSpec&>(eval.q_target.spec()).activation =
      nn::Activation::Tanh;

  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<diffusion::RewardTransition> batch(3);
  std::vector<double> ys;
  for (auto& t : batch) {
    t.cond = {u(rng), u(rng)};
    t.cond_next = {u(rng), u(rng)};
    t.r_g = u(rng);
    t.r_e = u(rng);
    t.done = false;
    ys.push_back(diffusion::evaluation_td_target(t, u(rng), eval.q_target,
                                                 ecfg.gamma));
  }
  auto loss = [&]() {
    double l = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
      const double e = ys[i] - eval.q.value(batch[i].cond, batch[i].r_g);
      l += e * e;
    }
    return l / batch.size();
  };
  auto& params = eval.q.params();
  params.zero_grads();
  std::vector<double> input(eval.q.spec().input_dim);
  nn::MlpCache cache;
  for (size_t i = 0; i < batch.size(); ++i) {
    std::copy(batch[i].cond.begin(), batch[i].cond.end(), input.begin());
    input.back() = batch[i].r_g;
    nn::mlp_forward_cached(eval.q.spec(), params, input, cache);
    const double up = 2.0 * (cache.output()[0] - ys[i]) / batch.size();
    nn::mlp_backward(eval.q.spec(), params, cache,
                     std::span<const double>(&up, 1), &params, {});
  }
  out.push_back({"dress_evaluation_td",
                 nn::finite_diff_check_loss(params, loss, kH), kTol});
}

}  // namespace

std::vector<GradCheckResult> run_gradcheck_suite(uint64_t seed) {
  std::vector<GradCheckResult> out;
  check_sac(out, seed);
  check_detpg(out, seed, true);
  check_detpg(out, seed, false);
  check_reinforce(out, seed);
  check_generation(out, seed);
  check_evaluation(out, seed);
  return out;
}

bool gradcheck_all_pass(const std::vector<GradCheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass()) return false;
  return !results.empty();
}

}  // namespace drs::run
