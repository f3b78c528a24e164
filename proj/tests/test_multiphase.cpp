#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nncv/dataio.hpp"
#include "nncv/errors.hpp"
#include "nncv/multiphase.hpp"
#include "oracles.hpp"

using namespace nncv;
using testing::Rng;

namespace {

std::vector<Vec2> regular_polygon(Vec2 center, double radius, int edges) {
  std::vector<Vec2> v;
  for (int i = 0; i < edges; ++i) {
    const double t = 2.0 * 3.14159265358979323846 * i / edges;
    v.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  return v;
}

MultiphaseModel triangle_model() {
  MultiphaseModel model;
  model.m = 1;
  model.epsilon = Smoothing(0.5);
  model.levelsets = {polygon_level_set({{0.2, 0.2}, {0.8, 0.2}, {0.5, 0.8}})};
  model.n1 = model.levelsets[0].size();
  model.constants = {1.0, 0.0};
  return model;
}

}  // namespace

TEST_CASE("sign pattern enumeration and round trips") {
  CHECK(SignPattern::from_index(3, 0).to_string() == "+++");
  CHECK(SignPattern::from_index(3, 1).to_string() == "++-");
  CHECK(SignPattern::from_index(3, 7).to_string() == "---");
  CHECK(SignPattern::parse("+-+").index() == 2);
  for (std::size_t idx = 0; idx < 16; ++idx) {
    CHECK(SignPattern::from_index(4, idx).index() == idx);
  }
  CHECK(SignPattern::from_index(2, 0) < SignPattern::from_index(2, 1));
  CHECK_THROWS_AS(SignPattern::parse("+x"), std::invalid_argument);
}

TEST_CASE("membership") {
  SUBCASE("single positive factor") {
    const MultiphaseModel model = triangle_model();
    // strictly inside the triangle the level-set is positive
    CHECK(membership(model, SignPattern::parse("+"), {0.5, 0.4}, ActKind::heaviside) == 1.0);
    CHECK(membership(model, SignPattern::parse("-"), {0.5, 0.4}, ActKind::heaviside) == 0.0);
  }

  SUBCASE("m=2 mixed pattern vanishes where both level-sets are positive") {
    MultiphaseModel model;
    model.m = 2;
    model.epsilon = Smoothing(0.5);
    // both positive on the whole unit square
    LayerParams pos;
    pos.a = {1.0};
    pos.w = {{0.0, 0.0}};
    pos.b = {1.0};
    model.levelsets = {pos, pos};
    model.n1 = 1;
    model.constants = {0.0, 0.0, 0.0, 0.0};
    CHECK(membership(model, SignPattern::parse("+-"), {0.3, 0.3}, ActKind::heaviside) == 0.0);
    CHECK(membership(model, SignPattern::parse("++"), {0.3, 0.3}, ActKind::heaviside) == 1.0);
  }

  SUBCASE("pattern length must match") {
    const MultiphaseModel model = triangle_model();
    CHECK_THROWS_AS(membership(model, SignPattern::parse("++"), {0.5, 0.5}, ActKind::sigmoid),
                    PatternLengthMismatch);
  }

  SUBCASE("partition of unity at 1000 random points") {
    Rng rng(17);
    for (int m = 1; m <= 5; ++m) {
      const MultiphaseModel model = testing::random_model(rng, m, 5, 0.5);
      for (int rep = 0; rep < 200; ++rep) {
        const Vec2 x{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        double sum = 0.0;
        for (std::size_t idx = 0; idx < model.pattern_count(); ++idx) {
          sum += membership(model, SignPattern::from_index(m, idx), x, ActKind::sigmoid);
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }

  SUBCASE("step memberships are 0/1 off the zero sets") {
    Rng rng(19);
    const MultiphaseModel model = testing::random_model(rng, 3, 5, 0.5);
    for (int rep = 0; rep < 200; ++rep) {
      const Vec2 x{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
      for (std::size_t idx = 0; idx < model.pattern_count(); ++idx) {
        const double v = membership(model, SignPattern::from_index(3, idx), x, ActKind::heaviside);
        CHECK((v == 0.0 || v == 1.0));
      }
    }
  }
}

TEST_CASE("eval_multiphase") {
  SUBCASE("equal constants give a constant function") {
    Rng rng(29);
    MultiphaseModel model = testing::random_model(rng, 3, 4, 0.5);
    for (double& c : model.constants) c = 5.0;
    for (int rep = 0; rep < 50; ++rep) {
      const Vec2 x{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
      CHECK(eval_multiphase(model, x, ActKind::sigmoid) == doctest::Approx(5.0).epsilon(1e-12));
      CHECK(eval_multiphase(model, x, ActKind::heaviside) == doctest::Approx(5.0).epsilon(1e-12));
    }
  }

  SUBCASE("triangle indicator") {
    const MultiphaseModel model = triangle_model();
    const std::vector<Vec2> tri = {{0.2, 0.2}, {0.8, 0.2}, {0.5, 0.8}};
    for (int j = 0; j < 50; ++j) {
      for (int i = 0; i < 50; ++i) {
        const Vec2 x{(i + 0.5) / 50, (j + 0.5) / 50};
        const double want = testing::point_in_convex_polygon(tri, x) ? 1.0 : 0.0;
        CHECK(eval_multiphase(model, x, ActKind::heaviside) == want);
      }
    }
  }

  SUBCASE("matches the composed two-layer form") {
    Rng rng(37);
    for (int m : {2, 3}) {
      const MultiphaseModel model = testing::random_model(rng, m, 5, 0.5);
      const double kappa = -static_cast<double>(m) + 1.0 / 3.0;
      const auto composed = [&](Vec2 x, ActKind kind) {
        const Activation act = kind == ActKind::heaviside
                                   ? Activation::make_heaviside()
                                   : Activation::make_sigmoid(model.epsilon);
        double out = 0.0;
        for (std::size_t idx = 0; idx < model.pattern_count(); ++idx) {
          const SignPattern pat = SignPattern::from_index(m, idx);
          double arg = kappa;
          for (int k = 0; k < m; ++k) {
            arg += act(pat.sign(k) * eval_one_layer(model.levelsets[k], x, act));
          }
          out += model.constants[idx] * act(arg);
        }
        return out;
      };

      // exact equality for the step activation away from zero level-sets
      for (int rep = 0; rep < 300; ++rep) {
        const Vec2 x{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        bool on_zero = false;
        for (int k = 0; k < m; ++k) {
          if (eval_one_layer(model.levelsets[k], x, Activation::make_heaviside()) == 0.0) {
            on_zero = true;
          }
        }
        if (on_zero) continue;
        CHECK(eval_multiphase(model, x, ActKind::heaviside) ==
              doctest::Approx(composed(x, ActKind::heaviside)).epsilon(1e-12));
      }

      // smoothed versions differ by at most the two smoothing gaps
      const auto smooth_multi = [&](Vec2 x) { return eval_multiphase(model, x, ActKind::sigmoid); };
      const auto step_multi = [&](Vec2 x) { return eval_multiphase(model, x, ActKind::heaviside); };
      const auto smooth_comp = [&](Vec2 x) { return composed(x, ActKind::sigmoid); };
      const auto step_comp = [&](Vec2 x) { return composed(x, ActKind::heaviside); };
      const double lhs = testing::grid_l2(smooth_multi, smooth_comp, 100);
      const double gap1 = testing::grid_l2(smooth_multi, step_multi, 100);
      const double gap2 = testing::grid_l2(step_comp, smooth_comp, 100);
      CHECK(lhs <= gap1 + gap2 + 1e-12);
    }
  }
}

TEST_CASE("region means") {
  SUBCASE("constant image pins every well-posed mean") {
    Rng rng(43);
    const GrayImage f(40, 40, 0.7);
    MultiphaseModel model = testing::random_model(rng, 2, 4, 0.5);
    const auto means = region_means(model, f);
    for (double c : means) CHECK(c == doctest::Approx(0.7).epsilon(1e-12));
  }

  SUBCASE("step split into known halves") {
    GrayImage f(50, 50, 0.0);
    for (int j = 0; j < 50; ++j) {
      for (int i = 0; i < 25; ++i) f.at(i, j) = 1.0;
    }
    MultiphaseModel model;
    model.m = 1;
    model.epsilon = Smoothing(0.5);
    LayerParams split;  // step minus 1/2: positive left, negative right
    split.a = {1.0, -0.5};
    split.w = {{-1.0, 0.0}, {0.0, 0.0}};
    split.b = {0.5, 1.0};
    model.levelsets = {split};
    model.n1 = 2;
    model.constants = {0.0, 0.0};
    const auto means = region_means(model, f, ActKind::heaviside);
    CHECK(means[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(means[1] == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("matches the dense-loop oracle to 1e-12") {
    Rng rng(47);
    DatasetSpec spec;
    spec.count = 1;
    spec.seed = 9;
    const GrayImage f = generate_dataset(spec)[0].image;
    const MultiphaseModel model = testing::random_model(rng, 4, 6, 0.5);
    const auto got = region_means(model, f);
    const auto want = testing::oracle_region_means(model, f);
    for (std::size_t idx = 0; idx < got.size(); ++idx) {
      CHECK(got[idx] == doctest::Approx(want[idx]).epsilon(1e-12));
    }
  }

  SUBCASE("degenerate regions keep the stored constant") {
    GrayImage f(20, 20, 0.3);
    MultiphaseModel model;
    model.m = 1;
    model.epsilon = Smoothing(0.01);
    LayerParams very_positive;
    very_positive.a = {100.0};
    very_positive.w = {{0.0, 0.0}};
    very_positive.b = {1.0};
    model.levelsets = {very_positive};
    model.n1 = 1;
    model.constants = {0.5, 0.77};
    const auto means = region_means(model, f);
    CHECK(means[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(means[1] == 0.77);  // untouched
  }
}

TEST_CASE("segmentation mask") {
  SUBCASE("triangle rasterization") {
    const MultiphaseModel model = triangle_model();
    const std::vector<Vec2> tri = {{0.2, 0.2}, {0.8, 0.2}, {0.5, 0.8}};
    const LabelMask mask = segmentation_mask(model, 64, 64, ActKind::heaviside);
    for (int j = 0; j < 64; ++j) {
      for (int i = 0; i < 64; ++i) {
        const Vec2 x{(i + 0.5) / 64, (j + 0.5) / 64};
        CHECK(mask.at(i, j) == (testing::point_in_convex_polygon(tri, x) ? 0 : 1));
      }
    }
  }

  SUBCASE("strictly positive level-sets label everything all-plus") {
    MultiphaseModel model;
    model.m = 3;
    model.epsilon = Smoothing(0.5);
    LayerParams pos;
    pos.a = {2.0};
    pos.w = {{0.0, 0.0}};
    pos.b = {1.0};
    model.levelsets = {pos, pos, pos};
    model.n1 = 1;
    model.constants.assign(8, 0.0);
    const LabelMask mask = segmentation_mask(model, 16, 16, ActKind::heaviside);
    for (std::uint16_t v : mask.labels) CHECK(v == 0);
  }

  SUBCASE("two nested polygons produce the nesting label structure") {
    MultiphaseModel model;
    model.m = 2;
    model.epsilon = Smoothing(0.5);
    model.levelsets = {polygon_level_set(regular_polygon({0.5, 0.5}, 0.35, 12)),
                       polygon_level_set(regular_polygon({0.5, 0.5}, 0.18, 12))};
    model.n1 = model.levelsets[0].size();
    model.constants.assign(4, 0.0);
    const LabelMask mask = segmentation_mask(model, 100, 100, ActKind::heaviside);
    CHECK(mask.at(50, 50) == 0);  // inside both -> "++"
    CHECK(mask.at(50, 22) == 1);  // ring: inside outer only -> "+-"
    CHECK(mask.at(2, 2) == 3);    // outside both -> "--"
    // inside the small polygon but outside the large one is empty
    CHECK(std::count(mask.labels.begin(), mask.labels.end(), 2) == 0);
  }
}

TEST_CASE("smoothed multiphase converges to the step version in grid-L2") {
  Rng rng(201);
  for (int rep = 0; rep < 10; ++rep) {
    MultiphaseModel model = testing::random_model(rng, 2, 5, 1.0);
    const auto step_fn = [&](Vec2 x) { return eval_multiphase(model, x, ActKind::heaviside); };
    double prev = 1e300;
    for (double e : {1.0, 0.5, 0.25, 0.1, 0.05}) {
      model.epsilon = Smoothing(e);
      const double d = testing::grid_l2(
          step_fn, [&](Vec2 x) { return eval_multiphase(model, x, ActKind::sigmoid); }, 128);
      CHECK(d < prev);
      prev = d;
    }
  }
}
