#pragma once

#include <span>
#include <vector>

namespace drs::diffusion {

/// Precomputed beta/alpha tables for a K-step denoising chain. Steps are
/// 1-based (k = 1..K); the cumulative product convention sets
/// alpha_bar_at(0) = 1, which forces posterior_var_at(1) = 0.
struct Schedule {
  int num_steps = 0;
  std::vector<double> beta;
  std::vector<double> alpha;          // 1 - beta
  std::vector<double> alpha_bar;      // running product of alpha
  std::vector<double> posterior_var;  // beta_k * (1-abar_{k-1}) / (1-abar_k)

  double beta_at(int k) const { return beta.at(k - 1); }
  double alpha_at(int k) const { return alpha.at(k - 1); }
  double alpha_bar_at(int k) const { return k == 0 ? 1.0 : alpha_bar.at(k - 1); }
  double posterior_var_at(int k) const { return posterior_var.at(k - 1); }

  static Schedule linear(int num_steps, double beta_start, double beta_end);
};

/// z_k = sqrt(abar_k) z0 + sqrt(1 - abar_k) eps
void forward_noise(std::span<const double> z0, int k, std::span<const double> eps,
                   const Schedule& schedule, std::span<double> out);

/// Sinusoidal embedding of the step index, constant w.r.t. parameters.
std::vector<double> timestep_embedding(int k, int dim);

}  // namespace drs::diffusion
