#pragma once

#include <random>
#include <span>
#include <vector>

#include "drs/diffusion/schedule.hpp"
#include "drs/nn/mlp.hpp"
#include "drs/nn/optim.hpp"

namespace drs::diffusion {

/// Coefficient convention for the reverse step
/// z_{k-1} = a * z0_hat + b * z_k + sigma * eps.
/// StandardPosterior is the usual DDPM posterior mean; ShiftedPosterior is
/// an alternative convention normalizing by 1 - abar_{k-1}, kept behind a
/// flag, with the k = 1 step collapsing to z0_hat in both modes.
enum class SamplerMode { StandardPosterior, ShiftedPosterior };

struct StepCoeffs {
  double z0_hat_coef = 0.0;
  double z_k_coef = 0.0;
  double sigma = 0.0;
};

StepCoeffs sampler_coeffs(const Schedule& schedule, int k, SamplerMode mode);

struct GenerationConfig {
  int cond_dim = 1;        // observation + action dims, concatenated
  int latent_dim = 8;
  int k_embed_dim = 8;
  std::vector<int> denoiser_hidden{64, 64};
  std::vector<int> head_hidden{64};
  double e_s = 1.0;        // reward scale
  double e_b = 0.0;        // reward bias
  SamplerMode mode = SamplerMode::StandardPosterior;
};

/// Conditional z0-predicting denoiser plus the max-entropy reward head.
/// The denoiser consumes [z_k, cond, k-embedding] and predicts the clean
/// latent; two small networks map that latent to the mean and (clipped)
/// log-std of the reward distribution.
struct GenerationAgent {
  GenerationConfig cfg;
  nn::MlpSpec denoiser_spec, mu_spec, sigma_spec;
  nn::ParamSet denoiser, head_mu, head_sigma;
  long skipped_updates = 0;

  static GenerationAgent make(const GenerationConfig& cfg, std::mt19937_64& rng);
};

/// Everything needed to backpropagate through one full generation:
/// the latent trajectory, per-step denoiser caches, and the head state.
struct ChainCache {
  std::vector<std::vector<double>> z;              // z[i] = z_{K-i}
  std::vector<nn::MlpCache> denoiser_caches;       // index K - k
  std::vector<std::vector<double>> z0_hat;         // index K - k
  nn::MlpCache mu_cache, sigma_cache;
  double kappa = 0.0;
  double log_sigma_raw = 0.0;  // before clipping
  double log_sigma = 0.0;      // after clipping
  double head_noise = 0.0;
  double pre_tanh = 0.0;
  double reward = 0.0;
};

/// Runs the reverse chain from z_K ~ N(0, I) down to z_0. The start latent
/// is always drawn from rng; per-step noise is added only when stochastic
/// (and never at k = 1). Aborts with a diagnostic on non-finite latents.
std::vector<double> reverse_sample(const GenerationAgent& agent,
                                   const Schedule& schedule,
                                   std::span<const double> cond,
                                   std::mt19937_64& rng, bool stochastic,
                                   ChainCache* cache = nullptr);

/// Reverse chain followed by the tanh reward head; returns a scalar in
/// [e_b - e_s, e_b + e_s].
double generate_reward_cond(const GenerationAgent& agent, const Schedule& schedule,
                            std::span<const double> cond, std::mt19937_64& rng,
                            bool stochastic, ChainCache* cache = nullptr);

double generate_reward(const GenerationAgent& agent, const Schedule& schedule,
                       std::span<const double> observation,
                       std::span<const double> action, std::mt19937_64& rng,
                       bool stochastic, ChainCache* cache = nullptr);

/// r_total = r_e + beta * r_g
double combine_rewards(double r_e, double r_g, double beta);

/// Reverse-mode pass through the cached chain: accumulates gradients of
/// upstream * reward into the denoiser and head ParamSets.
void generation_backward(GenerationAgent& agent, const Schedule& schedule,
                         const ChainCache& cache, double upstream);

/// Supervised z0-regression oracle (test-side training path; the live
/// system has no clean-latent labels).
struct DenoiserSample {
  std::vector<double> z0;
  std::vector<double> cond;
  std::vector<double> eps;
  int k = 1;
};

double denoiser_supervised_loss(const GenerationAgent& agent,
                                const Schedule& schedule,
                                std::span<const DenoiserSample> batch);

double denoiser_supervised_step(GenerationAgent& agent, const Schedule& schedule,
                                std::span<const DenoiserSample> batch,
                                const nn::AdamConfig& adam);

}  // namespace drs::diffusion
