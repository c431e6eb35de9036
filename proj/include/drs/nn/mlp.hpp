#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

namespace drs::nn {

enum class Activation { Relu, Tanh };

/// Dense multi-layer network description. Parameters live in a flat
/// ParamSet; the spec maps the flat vector onto (W, b) pairs per layer,
/// weights row-major (out x in) followed by the bias.
struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims;
  int output_dim = 1;
  Activation activation = Activation::Relu;

  // [input_dim, hidden..., output_dim]
  std::vector<int> layer_dims() const;
  int param_count() const;
  void validate() const;  // throws std::invalid_argument on bad dims
};

/// Flat parameter vector with gradient and Adam state, all same length.
struct ParamSet {
  std::vector<double> values;
  std::vector<double> grads;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  long step_count = 0;

  static ParamSet zeros(int n);
  int size() const { return static_cast<int>(values.size()); }
  void zero_grads();
};

/// Fan-in scaled uniform init, zero biases.
ParamSet init_params(const MlpSpec& spec, std::mt19937_64& rng);

/// Per-layer activations kept for the backward pass. Buffers are reused
/// across calls to avoid reallocation in training loops.
struct MlpCache {
  std::vector<std::vector<double>> pre;   // pre-activation per layer
  std::vector<std::vector<double>> post;  // post-activation (post[0] = input copy)
  std::span<const double> output() const { return post.back(); }
};

void mlp_forward(const MlpSpec& spec, const ParamSet& params,
                 std::span<const double> input, std::span<double> output);

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamSet& params,
                                std::span<const double> input);

void mlp_forward_cached(const MlpSpec& spec, const ParamSet& params,
                        std::span<const double> input, MlpCache& cache);

/// Backprop of upstream . output. Accumulates parameter gradients into
/// param_grads when non-empty; writes d/d_input into grad_input when
/// non-empty. `cache` must come from mlp_forward_cached with `params`.
void mlp_backward(const MlpSpec& spec, const ParamSet& params,
                  const MlpCache& cache, std::span<const double> upstream,
                  std::span<double> param_grads, std::span<double> grad_input);

inline void mlp_backward(const MlpSpec& spec, const ParamSet& params,
                         const MlpCache& cache, std::span<const double> upstream,
                         ParamSet* accum, std::span<double> grad_input) {
  mlp_backward(spec, params, cache, upstream,
               accum ? std::span<double>(accum->grads) : std::span<double>{},
               grad_input);
}

}  // namespace drs::nn
