#include "drs/nn/kernels.hpp"

#include <stdexcept>

namespace drs::nn {

namespace reference {

void batch_forward(const MlpSpec& spec, const ParamSet& params,
                   std::span<const double> inputs, int batch,
                   std::span<double> outputs) {
  const int in = spec.input_dim, out = spec.output_dim;
  for (int b = 0; b < batch; ++b)
    mlp_forward(spec, params, inputs.subspan(static_cast<size_t>(b) * in, in),
                outputs.subspan(static_cast<size_t>(b) * out, out));
}

void batch_backward(const MlpSpec& spec, const ParamSet& params,
                    std::span<const double> inputs, int batch,
                    std::span<const double> upstreams, ParamSet& accum,
                    std::span<double> grad_inputs) {
  const int in = spec.input_dim, out = spec.output_dim;
  MlpCache cache;
  ParamSet local = ParamSet::zeros(params.size());
  for (int b = 0; b < batch; ++b) {
    mlp_forward_cached(spec, params,
                       inputs.subspan(static_cast<size_t>(b) * in, in), cache);
    local.zero_grads();
    std::span<double> gi = grad_inputs.empty()
        ? std::span<double>{}
        : grad_inputs.subspan(static_cast<size_t>(b) * in, in);
    mlp_backward(spec, params, cache,
                 upstreams.subspan(static_cast<size_t>(b) * out, out), &local, gi);
    for (int i = 0; i < accum.size(); ++i) accum.grads[i] += local.grads[i];
  }
}

}  // namespace reference

void BatchRunner::forward(const MlpSpec& spec, const ParamSet& params,
                          std::span<const double> inputs, int batch,
                          std::span<double> outputs) {
  const int in = spec.input_dim, out = spec.output_dim;
  batch_ = batch;
  caches_.resize(batch);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < batch; ++b) {
    mlp_forward_cached(spec, params,
                       inputs.subspan(static_cast<size_t>(b) * in, in),
                       caches_[b]);
    auto o = caches_[b].output();
    std::copy(o.begin(), o.end(),
              outputs.begin() + static_cast<size_t>(b) * out);
  }
}

void BatchRunner::backward(const MlpSpec& spec, const ParamSet& params,
                           std::span<const double> upstreams, ParamSet& accum,
                           std::span<double> grad_inputs) {
  const int in = spec.input_dim, out = spec.output_dim;
  if (batch_ == 0) throw std::logic_error("BatchRunner::backward before forward");
  sample_grads_.resize(batch_);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < batch_; ++b) {
    auto& g = sample_grads_[b];
    g.assign(params.size(), 0.0);
    std::span<double> gi = grad_inputs.empty()
        ? std::span<double>{}
        : grad_inputs.subspan(static_cast<size_t>(b) * in, in);
    mlp_backward(spec, params, caches_[b],
                 upstreams.subspan(static_cast<size_t>(b) * out, out),
                 std::span<double>(g), gi);
  }
  // ordered reduction keeps the result independent of thread count
  for (int b = 0; b < batch_; ++b) {
    const auto& g = sample_grads_[b];
    for (int i = 0; i < accum.size(); ++i) accum.grads[i] += g[i];
  }
}

}  // namespace drs::nn
