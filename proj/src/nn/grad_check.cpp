#include "drs/nn/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace drs::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({1e-6, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / denom;
}

double finite_diff_check(const MlpSpec& spec, ParamSet& params,
                         std::span<const double> input, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_check: h must be > 0");
  MlpCache cache;
  mlp_forward_cached(spec, params, input, cache);
  std::vector<double> upstream(spec.output_dim, 1.0);
  ParamSet accum = ParamSet::zeros(params.size());
  mlp_backward(spec, params, cache, upstream, &accum, {});

  auto objective = [&] {
    auto out = mlp_forward(spec, params, input);
    double s = 0.0;
    for (double v : out) s += v;
    return s;
  };

  double max_err = 0.0;
  for (int i = 0; i < params.size(); ++i) {
    const double save = params.values[i];
    params.values[i] = save + h;
    const double fp = objective();
    params.values[i] = save - h;
    const double fm = objective();
    params.values[i] = save;
    const double numeric = (fp - fm) / (2.0 * h);
    max_err = std::max(max_err, relative_error(accum.grads[i], numeric));
  }
  return max_err;
}

double finite_diff_check_loss(ParamSet& params,
                              const std::function<double()>& loss, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_check_loss: h must be > 0");
  double max_err = 0.0;
  for (int i = 0; i < params.size(); ++i) {
    const double save = params.values[i];
    params.values[i] = save + h;
    const double fp = loss();
    params.values[i] = save - h;
    const double fm = loss();
    params.values[i] = save;
    const double numeric = (fp - fm) / (2.0 * h);
    max_err = std::max(max_err, relative_error(params.grads[i], numeric));
  }
  return max_err;
}

}  // namespace drs::nn
