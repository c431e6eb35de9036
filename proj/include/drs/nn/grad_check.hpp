#pragma once

#include <functional>

#include "drs/nn/mlp.hpp"

namespace drs::nn {

/// Central-difference check of mlp_backward over every parameter, using the
/// scalar objective sum(output). Returns the max relative error.
double finite_diff_check(const MlpSpec& spec, ParamSet& params,
                         std::span<const double> input, double h);

/// Generic checker for hand-derived update gradients: `loss` must evaluate
/// the objective for the current params.values without side effects.
/// Compares params.grads (already populated by the code under test) against
/// central differences. Returns the max relative error.
double finite_diff_check_loss(ParamSet& params,
                              const std::function<double()>& loss, double h);

double relative_error(double analytic, double numeric);

}  // namespace drs::nn
