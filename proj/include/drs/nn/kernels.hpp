#pragma once

#include "drs/nn/mlp.hpp"

namespace drs::nn {

/// Straight-line serial kernels. These are the reference the OpenMP path is
/// tested against and the baseline in the kernel benchmark.
namespace reference {

void batch_forward(const MlpSpec& spec, const ParamSet& params,
                   std::span<const double> inputs, int batch,
                   std::span<double> outputs);

/// Accumulates parameter gradients of sum_b upstream_b . output_b into
/// accum.grads, iterating samples in order. grad_inputs may be empty.
void batch_backward(const MlpSpec& spec, const ParamSet& params,
                    std::span<const double> inputs, int batch,
                    std::span<const double> upstreams, ParamSet& accum,
                    std::span<double> grad_inputs);

}  // namespace reference

/// Batched forward/backward with OpenMP-parallel per-sample work. Gradient
/// contributions are reduced in sample-index order, so results are
/// bit-identical to the serial reference for any thread count.
class BatchRunner {
 public:
  void forward(const MlpSpec& spec, const ParamSet& params,
               std::span<const double> inputs, int batch,
               std::span<double> outputs);

  /// Requires the immediately preceding forward() on the same inputs.
  void backward(const MlpSpec& spec, const ParamSet& params,
                std::span<const double> upstreams, ParamSet& accum,
                std::span<double> grad_inputs);

 private:
  std::vector<MlpCache> caches_;
  std::vector<std::vector<double>> sample_grads_;
  int batch_ = 0;
};

}  // namespace drs::nn
