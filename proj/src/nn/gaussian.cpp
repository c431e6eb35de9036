#include "drs/nn/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace drs::nn {

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}
}  // namespace

double clip_log_std(double x) {
  return x < kLogStdMin ? kLogStdMin : (x > kLogStdMax ? kLogStdMax : x);
}

double tanh_log_jacobian(double x) {
  return 2.0 * (std::numbers::ln2 - x - softplus(-2.0 * x));
}

GaussianHeadOutput gaussian_tanh_sample(std::span<const double> mean,
                                        std::span<const double> log_std,
                                        std::span<const double> noise,
                                        double e_s, double e_b) {
  const size_t n = mean.size();
  if (log_std.size() != n || noise.size() != n)
    throw std::invalid_argument("gaussian_tanh_sample: length mismatch");
  GaussianHeadOutput out;
  out.mean.assign(mean.begin(), mean.end());
  out.log_std.resize(n);
  out.pre_tanh.resize(n);
  out.sample.resize(n);
  double lp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double ls = clip_log_std(log_std[i]);
    out.log_std[i] = ls;
    const double u = mean[i] + std::exp(ls) * noise[i];
    out.pre_tanh[i] = u;
    out.sample[i] = std::tanh(u) * e_s + e_b;
    lp += -ls - kHalfLog2Pi - 0.5 * noise[i] * noise[i];
    lp -= tanh_log_jacobian(u);
    lp -= std::log(e_s);
  }
  out.log_prob = lp;
  return out;
}

double gaussian_tanh_log_prob(std::span<const double> mean,
                              std::span<const double> log_std,
                              std::span<const double> pre_tanh, double e_s) {
  const size_t n = mean.size();
  if (log_std.size() != n || pre_tanh.size() != n)
    throw std::invalid_argument("gaussian_tanh_log_prob: length mismatch");
  double lp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double ls = clip_log_std(log_std[i]);
    const double z = (pre_tanh[i] - mean[i]) / std::exp(ls);
    lp += -ls - kHalfLog2Pi - 0.5 * z * z;
    lp -= tanh_log_jacobian(pre_tanh[i]);
    lp -= std::log(e_s);
  }
  return lp;
}

}  // namespace drs::nn
