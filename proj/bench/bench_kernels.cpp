#include <benchmark/benchmark.h>

#include <random>

#include "pldeconv/convolution.hpp"
#include "pldeconv/kernels.hpp"
#include "pldeconv/solver.hpp"
#include "pldeconv/synthetic.hpp"
#include "pldeconv/trajectory.hpp"

using namespace pldeconv;

namespace {

Image noise_image(int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image x(h, w);
  for (double& v : x.pixels()) v = u(rng);
  return x;
}

// Args: image side, kernel side.
template <auto Fn>
void apply_taps(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const Image padded = noise_image(n + m - 1, n + m - 1, 1);
  const Image taps = noise_image(m, m, 2);
  Image out(n, n);
  for (auto _ : state) {
    Fn(padded, taps, true, out);
    benchmark::DoNotOptimize(out.pixels().data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * m * m);
}

template <auto Fn>
void correlate_grid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const Image padded = noise_image(n + m - 1, n + m - 1, 3);
  const Image weights = noise_image(n, n, 4);
  Image out(m, m);
  for (auto _ : state) {
    Fn(padded, weights, out);
    benchmark::DoNotOptimize(out.pixels().data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * m * m);
}

void richardson_lucy_50(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image x = synthetic::make_scene(n, n, 5);
  const Kernel h = render_kernel(keypoints_from_line(8, 30, 4), {19, 1024, Centering::Centroid});
  const Image y = scaled(convolve(x, h), 20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(richardson_lucy(y, h, PhotonLevel(20), SolverConfig{}));
  }
}

}  // namespace

BENCHMARK(apply_taps<kernels::serial::apply_taps>)->Name("apply_taps/serial")->Args({128, 19})->Args({256, 31});
BENCHMARK(apply_taps<kernels::omp::apply_taps>)->Name("apply_taps/omp")->Args({128, 19})->Args({256, 31})->UseRealTime();
BENCHMARK(correlate_grid<kernels::serial::correlate_grid>)->Name("correlate_grid/serial")->Args({128, 19})->Args({256, 31});
BENCHMARK(correlate_grid<kernels::omp::correlate_grid>)->Name("correlate_grid/omp")->Args({128, 19})->Args({256, 31})->UseRealTime();
BENCHMARK(richardson_lucy_50)->Arg(128)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
