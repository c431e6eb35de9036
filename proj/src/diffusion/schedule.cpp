#include "drs/diffusion/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace drs::diffusion {

Schedule Schedule::linear(int num_steps, double beta_start, double beta_end) {
  if (num_steps < 1) throw std::invalid_argument("Schedule: K must be >= 1");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
    throw std::invalid_argument("Schedule: need 0 < beta_start <= beta_end < 1");
  Schedule s;
  s.num_steps = num_steps;
  s.beta.resize(num_steps);
  s.alpha.resize(num_steps);
  s.alpha_bar.resize(num_steps);
  s.posterior_var.resize(num_steps);
  double abar = 1.0;
  for (int i = 0; i < num_steps; ++i) {
    const double frac = num_steps == 1 ? 0.0 : static_cast<double>(i) / (num_steps - 1);
    s.beta[i] = beta_start + (beta_end - beta_start) * frac;
    s.alpha[i] = 1.0 - s.beta[i];
    const double abar_prev = abar;
    abar *= s.alpha[i];
    s.alpha_bar[i] = abar;
    s.posterior_var[i] = s.beta[i] * (1.0 - abar_prev) / (1.0 - abar);
  }
  return s;
}

void forward_noise(std::span<const double> z0, int k, std::span<const double> eps,
                   const Schedule& schedule, std::span<double> out) {
  if (k < 1 || k > schedule.num_steps)
    throw std::invalid_argument("forward_noise: k outside [1, K]");
  if (z0.size() != eps.size() || z0.size() != out.size())
    throw std::invalid_argument("forward_noise: length mismatch");
  const double a = std::sqrt(schedule.alpha_bar_at(k));
  const double b = std::sqrt(1.0 - schedule.alpha_bar_at(k));
  for (size_t i = 0; i < z0.size(); ++i) out[i] = a * z0[i] + b * eps[i];
}

std::vector<double> timestep_embedding(int k, int dim) {
  std::vector<double> e(dim);
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::pow(10000.0, -static_cast<double>(i) / half);
    e[2 * i] = std::sin(k * freq);
    e[2 * i + 1] = std::cos(k * freq);
  }
  if (dim % 2 == 1) e[dim - 1] = 0.0;
  return e;
}

}  // namespace drs::diffusion
