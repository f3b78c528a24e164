#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "nncv/dataio.hpp"
#include "nncv/energy.hpp"
#include "nncv/gradients.hpp"
#include "nncv/multiphase.hpp"
#include "nncv/networks.hpp"

using namespace nncv;

namespace {

LayerParams make_network(std::mt19937_64& rng, int n1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LayerParams p;
  p.a.resize(n1);
  p.w.resize(n1);
  p.b.resize(n1);
  for (int j = 0; j < n1; ++j) {
    p.a[j] = u(rng);
    p.w[j] = {2.0 * u(rng), 2.0 * u(rng)};
    p.b[j] = u(rng);
  }
  return p;
}

MultiphaseModel make_model(int m, int n1, double eps) {
  std::mt19937_64 rng(42);
  MultiphaseModel model;
  model.m = m;
  model.n1 = n1;
  model.epsilon = Smoothing(eps);
  for (int k = 0; k < m; ++k) model.levelsets.push_back(make_network(rng, n1));
  model.constants.resize(model.pattern_count());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& c : model.constants) c = u(rng);
  return model;
}

GrayImage make_image() {
  DatasetSpec spec;
  spec.count = 1;
  spec.seed = 7;
  return generate_dataset(spec)[0].image;
}

}  // namespace

static void BM_eval_one_layer(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const LayerParams p = make_network(rng, static_cast<int>(state.range(0)));
  const Activation act = Activation::make_sigmoid(Smoothing(0.5));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_one_layer(p, {x, 0.5}, act));
    x = x < 0.9 ? x + 1e-4 : 0.1;
  }
}
BENCHMARK(BM_eval_one_layer)->Arg(16)->Arg(64)->Arg(256);

static void BM_polygon_indicator_eval(benchmark::State& state) {
  const std::vector<Vec2> tri = {{0.2, 0.2}, {0.8, 0.2}, {0.5, 0.8}};
  const TwoLayerParams net =
      build_polygon_indicator(polygon_edge_lines(tri), {1, 1, 1}, 1.0, 0.0);
  const Activation step = Activation::make_heaviside();
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_two_layer(net, {x, 0.4}, step));
    x = x < 1.0 ? x + 1e-4 : 0.0;
  }
}
BENCHMARK(BM_polygon_indicator_eval);

static void BM_region_means(benchmark::State& state) {
  const MultiphaseModel model = make_model(static_cast<int>(state.range(0)), 32, 0.5);
  const GrayImage f = make_image();
  for (auto _ : state) {
    benchmark::DoNotOptimize(region_means(model, f));
  }
}
BENCHMARK(BM_region_means)->Arg(1)->Arg(2)->Arg(4);

static void BM_energy_levelset(benchmark::State& state) {
  const MultiphaseModel model = make_model(static_cast<int>(state.range(0)), 32, 0.5);
  const GrayImage f = make_image();
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_levelset(model, f, 0.01, 0.0));
  }
}
BENCHMARK(BM_energy_levelset)->Arg(1)->Arg(2)->Arg(4);

static void BM_grad_energy_full_batch(benchmark::State& state) {
  const MultiphaseModel model = make_model(static_cast<int>(state.range(0)), 32, 0.5);
  const GrayImage f = make_image();
  std::vector<std::size_t> batch(f.pixel_count());
  std::iota(batch.begin(), batch.end(), std::size_t{0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(grad_energy(model, f, 0.01, 0.0, batch));
  }
}
BENCHMARK(BM_grad_energy_full_batch)->Arg(1)->Arg(2);

static void BM_count_arrangement_regions(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AffineFn> lines;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    const double theta = 3.14159265358979323846 * u(rng);
    const Vec2 w{std::cos(theta), std::sin(theta)};
    const Vec2 p{0.2 + 0.6 * u(rng), 0.2 + 0.6 * u(rng)};
    lines.push_back({w, -dot(w, p)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        count_arrangement_regions(lines, {{-4.0, -4.0}, {5.0, 5.0}}, 512));
  }
}
BENCHMARK(BM_count_arrangement_regions)->Arg(3)->Arg(6);

BENCHMARK_MAIN();
