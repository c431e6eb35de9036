#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "drs/nn/kernels.hpp"

// Compares the serial reference batch kernels against the OpenMP BatchRunner
// and confirms bit-identical gradients (ordered reduction).

using namespace drs;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void bench_case(int in, std::vector<int> hidden, int out, int batch,
                int iters) {
  nn::MlpSpec spec{in, hidden, out, nn::Activation::Relu};
  std::mt19937_64 rng(7);
  auto params = nn::init_params(spec, rng);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> inputs(static_cast<size_t>(batch) * in);
  std::vector<double> upstreams(static_cast<size_t>(batch) * out, 1.0);
  for (auto& v : inputs) v = u(rng);
  std::vector<double> out_ref(static_cast<size_t>(batch) * out);
  std::vector<double> out_omp(out_ref.size());
  auto accum_ref = nn::ParamSet::zeros(spec.param_count());
  auto accum_omp = nn::ParamSet::zeros(spec.param_count());
  nn::BatchRunner runner;

  auto t0 = Clock::now();
  for (int i = 0; i < iters; ++i) {
    nn::reference::batch_forward(spec, params, inputs, batch, out_ref);
    nn::reference::batch_backward(spec, params, inputs, batch, upstreams,
                                  accum_ref, {});
  }
  const double serial_ms = ms_since(t0);

  t0 = Clock::now();
  for (int i = 0; i < iters; ++i) {
    runner.forward(spec, params, inputs, batch, out_omp);
    runner.backward(spec, params, upstreams, accum_omp, {});
  }
  const double omp_ms = ms_since(t0);

  bool identical = out_ref == out_omp;
  for (int i = 0; i < accum_ref.size(); ++i)
    identical = identical && accum_ref.grads[i] == accum_omp.grads[i];

  std::printf(
      "net %d-%d-%d batch %4d x%d iters: serial %8.2f ms, omp %8.2f ms, "
      "speedup %.2fx, grads %s\n",
      in, hidden[0], out, batch, iters, serial_ms, omp_ms,
      serial_ms / omp_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  bench_case(16, {64, 64}, 4, 64, 200);
  bench_case(16, {64, 64}, 4, 256, 100);
  bench_case(32, {128, 128}, 8, 256, 50);
  bench_case(32, {256, 256}, 8, 512, 20);
  return 0;
}
