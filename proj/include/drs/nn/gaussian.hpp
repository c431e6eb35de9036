#pragma once

#include <span>
#include <vector>

namespace drs::nn {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct GaussianHeadOutput {
  std::vector<double> mean;
  std::vector<double> log_std;   // after clipping
  std::vector<double> pre_tanh;  // mean + exp(log_std) * noise
  std::vector<double> sample;    // tanh(pre_tanh) * e_s + e_b
  double log_prob = 0.0;
};

double clip_log_std(double x);

/// log(1 - tanh^2(x)) via the cancellation-free identity
/// 2 * (log 2 - x - softplus(-2x)).
double tanh_log_jacobian(double pre_tanh);

/// Tanh-squashed Gaussian sample with the change-of-variables correction
/// (including the e_s scale term) folded into log_prob. log_std entries are
/// clipped to [kLogStdMin, kLogStdMax] internally.
GaussianHeadOutput gaussian_tanh_sample(std::span<const double> mean,
                                        std::span<const double> log_std,
                                        std::span<const double> noise,
                                        double e_s, double e_b);

/// Log-density of an already squashed sample given its pre-tanh value.
/// Used by score-function updates where the action is not reparameterized.
double gaussian_tanh_log_prob(std::span<const double> mean,
                              std::span<const double> log_std,
                              std::span<const double> pre_tanh, double e_s);

}  // namespace drs::nn
