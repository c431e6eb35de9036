#include "drs/diffusion/generation.hpp"

#include <cmath>
#include <stdexcept>

#include "drs/nn/gaussian.hpp"

namespace drs::diffusion {

StepCoeffs sampler_coeffs(const Schedule& s, int k, SamplerMode mode) {
  if (k < 1 || k > s.num_steps)
    throw std::invalid_argument("sampler_coeffs: k outside [1, K]");
  StepCoeffs c;
  if (mode == SamplerMode::StandardPosterior) {
    const double abar_k = s.alpha_bar_at(k);
    const double abar_prev = s.alpha_bar_at(k - 1);
    c.z0_hat_coef = std::sqrt(abar_prev) * s.beta_at(k) / (1.0 - abar_k);
    c.z_k_coef = std::sqrt(s.alpha_at(k)) * (1.0 - abar_prev) / (1.0 - abar_k);
    c.sigma = k == 1 ? 0.0 : std::sqrt(s.posterior_var_at(k));
  } else {
    if (k == 1) {
      c.z0_hat_coef = 1.0;  // 1 - abar_0 = 0: the printed form degenerates
      c.z_k_coef = 0.0;
      c.sigma = 0.0;
    } else {
      const double denom = 1.0 - s.alpha_bar_at(k - 1);
      c.z0_hat_coef = std::sqrt(s.alpha_at(k - 1)) * (1.0 - s.alpha_bar_at(k)) / denom;
      c.z_k_coef = std::sqrt(s.alpha_at(k)) * s.beta_at(k - 1) / denom;
      c.sigma = std::sqrt(s.posterior_var_at(k));
    }
  }
  return c;
}

GenerationAgent GenerationAgent::make(const GenerationConfig& cfg,
                                      std::mt19937_64& rng) {
  if (cfg.cond_dim < 1 || cfg.latent_dim < 1 || cfg.k_embed_dim < 1)
    throw std::invalid_argument("GenerationAgent: bad dims");
  GenerationAgent a;
  a.cfg = cfg;
  a.denoiser_spec = {cfg.latent_dim + cfg.cond_dim + cfg.k_embed_dim,
                     cfg.denoiser_hidden, cfg.latent_dim, nn::Activation::Relu};
  a.mu_spec = {cfg.latent_dim, cfg.head_hidden, 1, nn::Activation::Relu};
  a.sigma_spec = {cfg.latent_dim, cfg.head_hidden, 1, nn::Activation::Relu};
  a.denoiser = nn::init_params(a.denoiser_spec, rng);
  a.head_mu = nn::init_params(a.mu_spec, rng);
  a.head_sigma = nn::init_params(a.sigma_spec, rng);
  return a;
}

std::vector<double> reverse_sample(const GenerationAgent& agent,
                                   const Schedule& schedule,
                                   std::span<const double> cond,
                                   std::mt19937_64& rng, bool stochastic,
                                   ChainCache* cache) {
  const auto& cfg = agent.cfg;
  if (static_cast<int>(cond.size()) != cfg.cond_dim)
    throw std::invalid_argument("reverse_sample: cond length != cond_dim");
  const int K = schedule.num_steps;
  const int L = cfg.latent_dim;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(L);
  for (auto& x : z) x = normal(rng);

  if (cache) {
    cache->z.assign(1, z);
    cache->denoiser_caches.resize(K);
    cache->z0_hat.assign(K, {});
  }

  std::vector<double> input(agent.denoiser_spec.input_dim);
  std::copy(cond.begin(), cond.end(), input.begin() + L);
  nn::MlpCache scratch;
  for (int k = K; k >= 1; --k) {
    std::copy(z.begin(), z.end(), input.begin());
    auto emb = timestep_embedding(k, cfg.k_embed_dim);
    std::copy(emb.begin(), emb.end(), input.begin() + L + cfg.cond_dim);

    nn::MlpCache& dc = cache ? cache->denoiser_caches[K - k] : scratch;
    nn::mlp_forward_cached(agent.denoiser_spec, agent.denoiser, input, dc);
    auto z0_hat = dc.output();
    if (cache) cache->z0_hat[K - k].assign(z0_hat.begin(), z0_hat.end());

    const StepCoeffs c = sampler_coeffs(schedule, k, cfg.mode);
    for (int i = 0; i < L; ++i) {
      double v = c.z0_hat_coef * z0_hat[i] + c.z_k_coef * z[i];
      if (stochastic && k > 1 && c.sigma > 0.0) v += c.sigma * normal(rng);
      z[i] = v;
    }
    if (!nn::all_finite(z))
      throw std::runtime_error("reverse_sample: non-finite latent at step " +
                               std::to_string(k));
    if (cache) cache->z.push_back(z);
  }
  return z;
}

double generate_reward_cond(const GenerationAgent& agent, const Schedule& schedule,
                            std::span<const double> cond, std::mt19937_64& rng,
                            bool stochastic, ChainCache* cache) {
  const auto& cfg = agent.cfg;
  ChainCache local;
  ChainCache& cc = cache ? *cache : local;
  auto z0 = reverse_sample(agent, schedule, cond, rng, stochastic, &cc);

  nn::mlp_forward_cached(agent.mu_spec, agent.head_mu, z0, cc.mu_cache);
  nn::mlp_forward_cached(agent.sigma_spec, agent.head_sigma, z0, cc.sigma_cache);
  cc.kappa = cc.mu_cache.output()[0];
  cc.log_sigma_raw = cc.sigma_cache.output()[0];
  cc.log_sigma = nn::clip_log_std(cc.log_sigma_raw);
  std::normal_distribution<double> normal(0.0, 1.0);
  cc.head_noise = stochastic ? normal(rng) : 0.0;
  cc.pre_tanh = cc.kappa + std::exp(cc.log_sigma) * cc.head_noise;
  cc.reward = std::tanh(cc.pre_tanh) * cfg.e_s + cfg.e_b;
  return cc.reward;
}

double generate_reward(const GenerationAgent& agent, const Schedule& schedule,
                       std::span<const double> observation,
                       std::span<const double> action, std::mt19937_64& rng,
                       bool stochastic, ChainCache* cache) {
  std::vector<double> cond;
  cond.reserve(observation.size() + action.size());
  cond.insert(cond.end(), observation.begin(), observation.end());
  cond.insert(cond.end(), action.begin(), action.end());
  return generate_reward_cond(agent, schedule, cond, rng, stochastic, cache);
}

double combine_rewards(double r_e, double r_g, double beta) {
  if (beta < 0.0) throw std::invalid_argument("combine_rewards: beta must be >= 0");
  return r_e + beta * r_g;
}

void generation_backward(GenerationAgent& agent, const Schedule& schedule,
                         const ChainCache& cache, double upstream) {
  const auto& cfg = agent.cfg;
  const int K = schedule.num_steps;
  const int L = cfg.latent_dim;

  // reward head
  const double th = std::tanh(cache.pre_tanh);
  const double d_pre = upstream * cfg.e_s * (1.0 - th * th);
  const double d_kappa = d_pre;
  const double clip_active = (cache.log_sigma_raw > nn::kLogStdMin &&
                              cache.log_sigma_raw < nn::kLogStdMax)
                                 ? 1.0
                                 : 0.0;
  const double d_log_sigma =
      d_pre * std::exp(cache.log_sigma) * cache.head_noise * clip_active;

  std::vector<double> d_z0(L, 0.0), tmp(L);
  nn::mlp_backward(agent.mu_spec, agent.head_mu, cache.mu_cache,
                   std::vector<double>{d_kappa}, &agent.head_mu, tmp);
  for (int i = 0; i < L; ++i) d_z0[i] += tmp[i];
  if (d_log_sigma != 0.0) {
    nn::mlp_backward(agent.sigma_spec, agent.head_sigma, cache.sigma_cache,
                     std::vector<double>{d_log_sigma}, &agent.head_sigma, tmp);
    for (int i = 0; i < L; ++i) d_z0[i] += tmp[i];
  }

  // walk the chain back up: z_{k-1} = a * z0_hat(z_k) + b * z_k + noise
  std::vector<double> dz = d_z0;
  std::vector<double> d_z0_hat(L), d_input(agent.denoiser_spec.input_dim);
  for (int k = 1; k <= K; ++k) {
    const StepCoeffs c = sampler_coeffs(schedule, k, cfg.mode);
    for (int i = 0; i < L; ++i) d_z0_hat[i] = c.z0_hat_coef * dz[i];
    nn::mlp_backward(agent.denoiser_spec, agent.denoiser,
                     cache.denoiser_caches[K - k], d_z0_hat, &agent.denoiser,
                     d_input);
    for (int i = 0; i < L; ++i) dz[i] = d_input[i] + c.z_k_coef * dz[i];
  }
}

double denoiser_supervised_loss(const GenerationAgent& agent,
                                const Schedule& schedule,
                                std::span<const DenoiserSample> batch) {
  const auto& cfg = agent.cfg;
  const int L = cfg.latent_dim;
  std::vector<double> input(agent.denoiser_spec.input_dim), z_k(L);
  double loss = 0.0;
  for (const auto& s : batch) {
    forward_noise(s.z0, s.k, s.eps, schedule, z_k);
    std::copy(z_k.begin(), z_k.end(), input.begin());
    std::copy(s.cond.begin(), s.cond.end(), input.begin() + L);
    auto emb = timestep_embedding(s.k, cfg.k_embed_dim);
    std::copy(emb.begin(), emb.end(), input.begin() + L + cfg.cond_dim);
    auto pred = nn::mlp_forward(agent.denoiser_spec, agent.denoiser, input);
    for (int i = 0; i < L; ++i) {
      const double d = s.z0[i] - pred[i];
      loss += d * d;
    }
  }
  return loss / (static_cast<double>(batch.size()) * L);
}

double denoiser_supervised_step(GenerationAgent& agent, const Schedule& schedule,
                                std::span<const DenoiserSample> batch,
                                const nn::AdamConfig& adam) {
  const auto& cfg = agent.cfg;
  const int L = cfg.latent_dim;
  std::vector<double> input(agent.denoiser_spec.input_dim), z_k(L), up(L);
  nn::MlpCache cache;
  double loss = 0.0;
  const double scale = 1.0 / (static_cast<double>(batch.size()) * L);
  for (const auto& s : batch) {
    forward_noise(s.z0, s.k, s.eps, schedule, z_k);
    std::copy(z_k.begin(), z_k.end(), input.begin());
    std::copy(s.cond.begin(), s.cond.end(), input.begin() + L);
    auto emb = timestep_embedding(s.k, cfg.k_embed_dim);
    std::copy(emb.begin(), emb.end(), input.begin() + L + cfg.cond_dim);
    nn::mlp_forward_cached(agent.denoiser_spec, agent.denoiser, input, cache);
    auto pred = cache.output();
    for (int i = 0; i < L; ++i) {
      const double d = pred[i] - s.z0[i];
      loss += d * d;
      up[i] = 2.0 * d * scale;
    }
    nn::mlp_backward(agent.denoiser_spec, agent.denoiser, cache, up,
                     &agent.denoiser, {});
  }
  loss *= scale;
  if (!nn::adam_step(agent.denoiser, adam)) {
    agent.denoiser.zero_grads();
    agent.skipped_updates += 1;
  }
  return loss;
}

}  // namespace drs::diffusion
