#include "drs/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace drs::nn {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool adam_step(ParamSet& params, const AdamConfig& cfg) {
  if (!all_finite(params.grads)) return false;
  params.step_count += 1;
  const double t = static_cast<double>(params.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (int i = 0; i < params.size(); ++i) {
    const double g = params.grads[i];
    params.adam_m[i] = cfg.beta1 * params.adam_m[i] + (1.0 - cfg.beta1) * g;
    params.adam_v[i] = cfg.beta2 * params.adam_v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = params.adam_m[i] / bc1;
    const double vhat = params.adam_v[i] / bc2;
    params.values[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  params.zero_grads();
  return true;
}

void soft_update(ParamSet& target, const ParamSet& source, double tau) {
  if (target.size() != source.size())
    throw std::invalid_argument("soft_update: length mismatch");
  if (tau <= 0.0 || tau > 1.0)
    throw std::invalid_argument("soft_update: tau must be in (0, 1]");
  for (int i = 0; i < target.size(); ++i)
    target.values[i] = tau * source.values[i] + (1.0 - tau) * target.values[i];
}

}  // namespace drs::nn
