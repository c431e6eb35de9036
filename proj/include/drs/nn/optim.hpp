#pragma once

#include "drs/nn/mlp.hpp"

namespace drs::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam step. Gradients are zeroed after a successful step.
/// Returns false (and leaves everything untouched) if any gradient is
/// non-finite.
bool adam_step(ParamSet& params, const AdamConfig& cfg);

/// target <- tau * source + (1 - tau) * target, element-wise.
void soft_update(ParamSet& target, const ParamSet& source, double tau);

bool all_finite(std::span<const double> v);

}  // namespace drs::nn
