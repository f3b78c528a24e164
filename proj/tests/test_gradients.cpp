#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "nncv/dataio.hpp"
#include "nncv/gradients.hpp"
#include "oracles.hpp"

using namespace nncv;
using testing::Rng;

namespace {

GrayImage circles_image(std::uint64_t seed) {
  DatasetSpec spec;
  spec.count = 1;
  spec.seed = seed;
  return generate_dataset(spec)[0].image;
}

std::vector<std::size_t> all_pixels(const GrayImage& f) {
  std::vector<std::size_t> idx(f.pixel_count());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

double component_gap(const ParamGradient& a, const ParamGradient& b) {
  double worst = 0.0;
  for (int j = 0; j < a.size(); ++j) {
    worst = std::max(worst, std::abs(a.a[j] - b.a[j]));
    worst = std::max(worst, std::abs(a.w[j].x - b.w[j].x));
    worst = std::max(worst, std::abs(a.w[j].y - b.w[j].y));
    worst = std::max(worst, std::abs(a.b[j] - b.b[j]));
  }
  return worst;
}

}  // namespace

TEST_CASE("gradient vanishes at the constant-image optimum") {
  Rng rng(81);
  const GrayImage f(30, 30, 0.6);
  MultiphaseModel model = testing::random_model(rng, 2, 6, 0.5);
  model.constants = region_means(model, f);  // all equal 0.6
  const EnergyGradient g = grad_energy(model, f, 0.0, 0.0, all_pixels(f));
  CHECK(g.max_levelset_norm() < 1e-8);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(83);
  const GrayImage f = circles_image(21);

  SUBCASE("full energy, m=2") {
    MultiphaseModel model = testing::random_model(rng, 2, 6, 0.5);
    model.constants = region_means(model, f);
    CHECK(finite_difference_check(model, f, 0.5, 0.1, 1e-5) < 1e-4);
  }

  SUBCASE("isolated length term") {
    // constant image and matching constants kill the data term
    const GrayImage flat(40, 40, 0.5);
    MultiphaseModel model = testing::random_model(rng, 1, 2, 0.5);
    model.constants = region_means(model, flat);
    CHECK(finite_difference_check(model, flat, 1.0, 0.0, 1e-5) < 1e-4);
  }

  SUBCASE("trivial zero configuration reports zero error") {
    const GrayImage zero(10, 10, 0.0);
    MultiphaseModel model;
    model.m = 1;
    model.n1 = 2;
    model.epsilon = Smoothing(0.5);
    model.levelsets = {LayerParams::zeros(2)};
    model.constants = {0.0, 0.0};
    CHECK(finite_difference_check(model, zero, 0.0, 0.0, 1e-5) == 0.0);
  }

  SUBCASE("desk-scale configuration") {
    Rng r2(85);
    MultiphaseModel model = testing::random_model(r2, 2, 16, 0.5);
    model.constants = region_means(model, f);
    CHECK(finite_difference_check(model, f, 0.5, 0.0, 1e-5) < 1e-4);
  }

  SUBCASE("error shrinks with the step then hits the rounding floor") {
    Rng r3(87);
    MultiphaseModel model = testing::random_model(r3, 1, 4, 0.5);
    model.constants = region_means(model, f);
    const double coarse = finite_difference_check(model, f, 0.5, 0.1, 1e-3);
    const double mid = finite_difference_check(model, f, 0.5, 0.1, 1e-4);
    const double fine = finite_difference_check(model, f, 0.5, 0.1, 1e-5);
    const double finest = finite_difference_check(model, f, 0.5, 0.1, 1e-6);
    CHECK(mid < coarse);
    CHECK(fine < coarse);
    CHECK(finest < coarse);  // plateaus near the rounding floor, stays small
    CHECK(finest < 1e-3);
  }
}

TEST_CASE("batch structure") {
  Rng rng(89);
  const GrayImage f = circles_image(23);
  MultiphaseModel model = testing::random_model(rng, 2, 4, 0.5);
  model.constants = region_means(model, f);

  SUBCASE("empty batches are rejected") {
    CHECK_THROWS_AS(grad_energy(model, f, 0.5, 0.0, {}), EmptyBatch);
  }

  SUBCASE("union of disjoint batches is the size-weighted average") {
    std::vector<std::size_t> first, second, both;
    for (std::size_t p = 0; p < 600; ++p) first.push_back(p);
    for (std::size_t p = 600; p < 1500; ++p) second.push_back(p);
    both = first;
    both.insert(both.end(), second.begin(), second.end());

    const EnergyGradient ga = grad_energy(model, f, 0.5, 0.1, first);
    const EnergyGradient gb = grad_energy(model, f, 0.5, 0.1, second);
    const EnergyGradient gu = grad_energy(model, f, 0.5, 0.1, both);
    const double wa = 600.0 / 1500.0;
    for (int k = 0; k < model.m; ++k) {
      ParamGradient mix = ParamGradient::zeros_like(model.levelsets[k]);
      for (int j = 0; j < mix.size(); ++j) {
        mix.a[j] = wa * ga.levelsets[k].a[j] + (1.0 - wa) * gb.levelsets[k].a[j];
        mix.w[j] = wa * ga.levelsets[k].w[j] + (1.0 - wa) * gb.levelsets[k].w[j];
        mix.b[j] = wa * ga.levelsets[k].b[j] + (1.0 - wa) * gb.levelsets[k].b[j];
      }
      CHECK(component_gap(mix, gu.levelsets[k]) < 1e-12);
    }
  }
}

TEST_CASE("residual shift invariance of the data gradient") {
  Rng rng(91);
  GrayImage f = circles_image(25);
  for (double& v : f.pixels) v = std::min(v, 0.85);
  MultiphaseModel model = testing::random_model(rng, 2, 4, 0.5);
  model.constants = region_means(model, f);

  const EnergyGradient base = grad_energy(model, f, 0.0, 0.0, all_pixels(f));

  GrayImage shifted = f;
  for (double& v : shifted.pixels) v += 0.1;
  MultiphaseModel shifted_model = model;
  for (double& c : shifted_model.constants) c += 0.1;
  const EnergyGradient moved = grad_energy(shifted_model, shifted, 0.0, 0.0, all_pixels(f));

  for (int k = 0; k < model.m; ++k) {
    CHECK(component_gap(base.levelsets[k], moved.levelsets[k]) < 1e-12);
  }
}

TEST_CASE("area term couples only through nu") {
  Rng rng(93);
  const GrayImage f = circles_image(27);
  MultiphaseModel model = testing::random_model(rng, 3, 4, 0.5);
  model.constants = region_means(model, f);
  const auto batch = all_pixels(f);

  const EnergyGradient g0 = grad_energy(model, f, 0.5, 0.0, batch);
  const EnergyGradient g1 = grad_energy(model, f, 0.5, 3.0, batch);
  const EnergyGradient g2 = grad_energy(model, f, 0.5, 6.0, batch);
  // linear in nu, and the nu=0 gradient is untouched by the area path
  for (int k = 0; k < model.m; ++k) {
    for (int j = 0; j < model.n1; ++j) {
      const double step1 = g1.levelsets[k].a[j] - g0.levelsets[k].a[j];
      const double step2 = g2.levelsets[k].a[j] - g1.levelsets[k].a[j];
      CHECK(step1 == doctest::Approx(step2).epsilon(1e-9));
      CHECK(std::isfinite(g0.levelsets[k].a[j]));
    }
  }
}
