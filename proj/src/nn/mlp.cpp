#include "drs/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace drs::nn {

std::vector<int> MlpSpec::layer_dims() const {
  std::vector<int> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(output_dim);
  return dims;
}

int MlpSpec::param_count() const {
  auto dims = layer_dims();
  int n = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l + 1] * (dims[l] + 1);
  return n;
}

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("MlpSpec: input_dim and output_dim must be >= 1");
  for (int h : hidden_dims)
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
}

ParamSet ParamSet::zeros(int n) {
  ParamSet p;
  p.values.assign(n, 0.0);
  p.grads.assign(n, 0.0);
  p.adam_m.assign(n, 0.0);
  p.adam_v.assign(n, 0.0);
  return p;
}

void ParamSet::zero_grads() { std::fill(grads.begin(), grads.end(), 0.0); }

ParamSet init_params(const MlpSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  ParamSet p = ParamSet::zeros(spec.param_count());
  auto dims = spec.layer_dims();
  size_t off = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (int i = 0; i < out * in; ++i) p.values[off + i] = u(rng);
    off += static_cast<size_t>(out) * (in + 1);  // biases stay zero
  }
  return p;
}

namespace {

inline double act(double x, Activation a) {
  return a == Activation::Relu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

inline double act_grad(double pre, double post, Activation a) {
  return a == Activation::Relu ? (pre > 0.0 ? 1.0 : 0.0) : 1.0 - post * post;
}

void check_input(const MlpSpec& spec, const ParamSet& params,
                 std::span<const double> input) {
  if (static_cast<int>(input.size()) != spec.input_dim)
    throw std::invalid_argument("mlp_forward: input length != spec.input_dim");
  if (params.size() != spec.param_count())
    throw std::invalid_argument("mlp_forward: param count mismatch");
}

}  // namespace

void mlp_forward_cached(const MlpSpec& spec, const ParamSet& params,
                        std::span<const double> input, MlpCache& cache) {
  check_input(spec, params, input);
  auto dims = spec.layer_dims();
  const size_t n_layers = dims.size() - 1;
  cache.pre.resize(n_layers);
  cache.post.resize(n_layers + 1);
  cache.post[0].assign(input.begin(), input.end());

  const double* w = params.values.data();
  for (size_t l = 0; l < n_layers; ++l) {
    const int in = dims[l], out = dims[l + 1];
    const bool last = (l + 1 == n_layers);
    auto& pre = cache.pre[l];
    auto& post = cache.post[l + 1];
    pre.resize(out);
    post.resize(out);
    const double* x = cache.post[l].data();
    const double* b = w + static_cast<size_t>(out) * in;
    for (int o = 0; o < out; ++o) {
      const double* row = w + static_cast<size_t>(o) * in;
      double s = b[o];
      for (int i = 0; i < in; ++i) s += row[i] * x[i];
      pre[o] = s;
      post[o] = last ? s : act(s, spec.activation);
    }
    w += static_cast<size_t>(out) * (in + 1);
  }
}

void mlp_forward(const MlpSpec& spec, const ParamSet& params,
                 std::span<const double> input, std::span<double> output) {
  thread_local MlpCache cache;
  mlp_forward_cached(spec, params, input, cache);
  if (static_cast<int>(output.size()) != spec.output_dim)
    throw std::invalid_argument("mlp_forward: output length != spec.output_dim");
  auto out = cache.output();
  std::copy(out.begin(), out.end(), output.begin());
}

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamSet& params,
                                std::span<const double> input) {
  std::vector<double> out(spec.output_dim);
  mlp_forward(spec, params, input, out);
  return out;
}

void mlp_backward(const MlpSpec& spec, const ParamSet& params,
                  const MlpCache& cache, std::span<const double> upstream,
                  std::span<double> param_grads, std::span<double> grad_input) {
  if (static_cast<int>(upstream.size()) != spec.output_dim)
    throw std::invalid_argument("mlp_backward: upstream length != output_dim");
  if (!param_grads.empty() &&
      static_cast<int>(param_grads.size()) != params.size())
    throw std::invalid_argument("mlp_backward: accumulator size mismatch");
  auto dims = spec.layer_dims();
  const size_t n_layers = dims.size() - 1;

  // delta = dL/d(pre-activation) of the current layer
  thread_local std::vector<double> delta, delta_prev;
  delta.assign(upstream.begin(), upstream.end());

  // offsets of each layer's parameter block
  std::vector<size_t> off(n_layers);
  size_t o = 0;
  for (size_t l = 0; l < n_layers; ++l) {
    off[l] = o;
    o += static_cast<size_t>(dims[l + 1]) * (dims[l] + 1);
  }

  for (size_t li = n_layers; li-- > 0;) {
    const int in = dims[li], out = dims[li + 1];
    const double* x = cache.post[li].data();
    const double* w = params.values.data() + off[li];
    if (!param_grads.empty()) {
      double* gw = param_grads.data() + off[li];
      double* gb = gw + static_cast<size_t>(out) * in;
      for (int oo = 0; oo < out; ++oo) {
        const double d = delta[oo];
        double* row = gw + static_cast<size_t>(oo) * in;
        for (int i = 0; i < in; ++i) row[i] += d * x[i];
        gb[oo] += d;
      }
    }
    const bool want_input = (li > 0) || !grad_input.empty();
    if (!want_input) break;
    delta_prev.assign(in, 0.0);
    for (int oo = 0; oo < out; ++oo) {
      const double d = delta[oo];
      const double* row = w + static_cast<size_t>(oo) * in;
      for (int i = 0; i < in; ++i) delta_prev[i] += d * row[i];
    }
    if (li > 0) {
      const auto& pre = cache.pre[li - 1];
      const auto& post = cache.post[li];
      for (int i = 0; i < in; ++i)
        delta_prev[i] *= act_grad(pre[i], post[i], spec.activation);
      delta.swap(delta_prev);
    } else if (!grad_input.empty()) {
      if (static_cast<int>(grad_input.size()) != spec.input_dim)
        throw std::invalid_argument("mlp_backward: grad_input length != input_dim");
      std::copy(delta_prev.begin(), delta_prev.end(), grad_input.begin());
    }
  }
}

}  // namespace drs::nn
