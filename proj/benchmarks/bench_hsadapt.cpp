#include <benchmark/benchmark.h>

#include "hsadapt/adapter.hpp"
#include "hsadapt/degrade.hpp"
#include "hsadapt/phantom.hpp"
#include "hsadapt/solver.hpp"
#include "hsadapt/train.hpp"

using namespace hsadapt;

namespace {

DenoiserHandle mixing_gaussian() {
  GaussianKernelOptions opt;
  opt.chroma_width_scale = 2.0;
  return gaussian_kernel_denoiser(3, opt);
}

HSImage cube(std::size_t side) { return make_phantom(Shape{side, side, 31}, 3, 1); }

void BM_Orthonormalize(benchmark::State& state) {
  Matrix e = Matrix::Random(33, 31);
  for (auto _ : state) benchmark::DoNotOptimize(orthonormalize(e, 3));
}
BENCHMARK(BM_Orthonormalize);

void BM_EncodeDecode(benchmark::State& state) {
  const HSImage x = cube(static_cast<std::size_t>(state.range(0)));
  const EncoderSpec spec = ablation_encoder(AblationKind::seq_rgb, 31);
  for (auto _ : state) benchmark::DoNotOptimize(decode_aggregate(encode(x, spec), spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.plane_size()));
}
BENCHMARK(BM_EncodeDecode)->Arg(64)->Arg(128);

void BM_DenoiseHs(benchmark::State& state) {
  const HSImage x = add_awgn(cube(static_cast<std::size_t>(state.range(0))), 0.1, 2);
  const WrappedDenoiser wrapped(ablation_encoder(AblationKind::seq_rgb, 31),
                                state.range(1) ? wavelet_soft_threshold_denoiser(3) : mixing_gaussian());
  for (auto _ : state) benchmark::DoNotOptimize(denoise_hs(x, 0.1, wrapped));
}
BENCHMARK(BM_DenoiseHs)->Args({64, 0})->Args({64, 1})->Args({128, 0});

void BM_ProxBlurFft(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const DegradationOp op = DegradationOp::gaussian_blur(side, side);
  const HSImage x = cube(side);
  const HSImage y = apply(op, x);
  for (auto _ : state) benchmark::DoNotOptimize(prox_data(op, y, x, 0.05));
}
BENCHMARK(BM_ProxBlurFft)->Arg(64)->Arg(128);

void BM_ProxSisrCg(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const DegradationOp op = DegradationOp::downsample(side, side);
  const HSImage x = cube(side);
  const HSImage y = apply(op, x);
  for (auto _ : state) benchmark::DoNotOptimize(prox_data(op, y, bilinear_upsample(y, 4), 0.05));
}
BENCHMARK(BM_ProxSisrCg)->Arg(64)->Arg(128);

void BM_RestoreDeblur(benchmark::State& state) {
  const TaskSetup t = make_task(Task::deblur, 64, 64);
  const HSImage y = add_awgn(apply(t.op, cube(64)), t.sigma, 3);
  const WrappedDenoiser wrapped(ablation_encoder(AblationKind::seq_rgb, 31), mixing_gaussian());
  for (auto _ : state) benchmark::DoNotOptimize(restore(y, t.op, t.sigma, wrapped, HQSConfig{}));
}
BENCHMARK(BM_RestoreDeblur)->Unit(benchmark::kMillisecond);

void BM_GradEstimate(benchmark::State& state) {
  std::vector<TrainingSample> batch;
  for (std::uint64_t i = 0; i < 4; ++i) {
    const HSImage x = make_phantom(Shape{32, 32, 31}, 3, 10 + i);
    batch.push_back({add_awgn(x, 0.1, 20 + i), x, 0.1});
  }
  const Matrix et = ablation_encoder(AblationKind::seq_rgb, 31).encoder();
  TrainConfig cfg;
  cfg.grad_estimator = static_cast<GradientEstimator>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grad_estimate(et, 3, batch, mixing_gaussian(), cfg, 7));
  state.SetLabel(std::string(to_string(cfg.grad_estimator)));
}
BENCHMARK(BM_GradEstimate)
    ->Arg(static_cast<int>(GradientEstimator::spsa))
    ->Arg(static_cast<int>(GradientEstimator::analytic_linear))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
