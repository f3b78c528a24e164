#include "nncv/verify.hpp"

#include <cmath>
#include <random>

#include "nncv/dataio.hpp"
#include "nncv/energy.hpp"
#include "nncv/gradients.hpp"
#include "nncv/multiphase.hpp"
#include "nncv/networks.hpp"

namespace nncv {

namespace {

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
};

}  // namespace

BoundingBox line_probe_box() { return {{-4.0, -4.0}, {5.0, 5.0}}; }

std::vector<AffineFn> well_separated_lines(std::mt19937_64& rng, int n) {
  constexpr double kPi = 3.14159265358979323846;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<AffineFn> lines;
    std::vector<double> thetas;
    lines.reserve(n);
    for (int i = 0; i < n; ++i) {
      // Slotted directions keep every pairwise angle above 0.6*pi/n, so all
      // intersections of unit-square anchors stay well inside the probe box.
      const double theta = kPi * (i + 0.3 + 0.4 * unit(rng)) / n;
      thetas.push_back(theta);
      const Vec2 w{std::cos(theta), std::sin(theta)};
      const Vec2 p{0.2 + 0.6 * unit(rng), 0.2 + 0.6 * unit(rng)};
      lines.push_back({w, -dot(w, p)});
    }

    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n && ok; ++j) {
        double diff = std::abs(thetas[i] - thetas[j]);
        diff = std::min(diff, kPi - diff);
        if (diff < 0.2) ok = false;
      }
    }
    if (!ok) continue;

    std::vector<Vec2> cuts;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n && ok; ++j) {
        const Vec2 wi = lines[i].w, wj = lines[j].w;
        const double det = wi.x * wj.y - wi.y * wj.x;
        const Vec2 v{(-lines[i].b * wj.y + lines[j].b * wi.y) / det,
                     (-wi.x * lines[j].b + wj.x * lines[i].b) / det};
        if (v.x < -3.0 || v.x > 4.0 || v.y < -3.0 || v.y > 4.0) ok = false;
        cuts.push_back(v);
      }
    }
    for (std::size_t i = 0; i < cuts.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < cuts.size() && ok; ++j) {
        if (norm(cuts[i] - cuts[j]) < 0.12) ok = false;
      }
    }
    if (ok) return lines;
  }
  throw std::runtime_error("could not sample a well-separated line arrangement");
}

namespace {

LayerParams random_network(Draw& d, int n1) {
  LayerParams p;
  p.a.resize(n1);
  p.w.resize(n1);
  p.b.resize(n1);
  for (int j = 0; j < n1; ++j) {
    p.a[j] = d.uniform(-0.8, 0.8);
    const double theta = d.uniform(0.0, 6.283185307179586);
    const double mag = d.uniform(0.5, 2.0);
    p.w[j] = {mag * std::cos(theta), mag * std::sin(theta)};
    const Vec2 anchor{d.uniform(0.1, 0.9), d.uniform(0.1, 0.9)};
    p.b[j] = -dot(p.w[j], anchor);
  }
  return p;
}

MultiphaseModel random_model(Draw& d, int m, int n1, double eps) {
  MultiphaseModel model;
  model.m = m;
  model.n1 = n1;
  model.epsilon = Smoothing(eps);
  for (int k = 0; k < m; ++k) model.levelsets.push_back(random_network(d, n1));
  model.constants.resize(model.pattern_count());
  for (double& c : model.constants) c = d.uniform(0.0, 1.0);
  return model;
}

GrayImage circle_image(std::uint64_t seed) {
  DatasetSpec spec;
  spec.count = 1;
  spec.seed = seed;
  return generate_dataset(spec)[0].image;
}

}  // namespace

std::vector<VerifyCheck> run_verification(std::uint64_t seed) {
  std::vector<VerifyCheck> out;
  Draw d(seed);

  {  // analytic gradient vs central differences
    VerifyCheck c{"gradient-finite-difference", false, 0.0, 1e-4};
    const GrayImage f = circle_image(seed + 1);
    double worst = 0.0;
    for (int rep = 0; rep < 2; ++rep) {
      const MultiphaseModel model = random_model(d, rep + 1, 8, 0.5);
      worst = std::max(worst, finite_difference_check(model, f, 0.5, 0.1, 1e-5));
    }
    c.measured = worst;
    c.pass = worst < c.tolerance;
    out.push_back(c);
  }

  {  // region counts never exceed the combinatorial bound, equality in
     // general position
    VerifyCheck c{"arrangement-region-count", false, 0.0, 0.0};
    bool ok = true;
    double worst_excess = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      const int n = d.uniform_int(3, 6);
      const auto lines = well_separated_lines(d.rng, n);
      const double bound = n * (n + 1) / 2.0 + 1.0;
      const double count =
          static_cast<double>(count_arrangement_regions(lines, line_probe_box(), 4096));
      worst_excess = std::max(worst_excess, count - bound);
      if (count > bound) ok = false;
      if (general_position(lines, 1e-9) && count != bound) ok = false;
    }
    c.measured = worst_excess;
    c.pass = ok;
    out.push_back(c);
  }

  {  // memberships over all patterns sum to one
    VerifyCheck c{"membership-partition-of-unity", false, 0.0, 1e-12};
    double worst = 0.0;
    for (int m = 1; m <= 4; ++m) {
      const MultiphaseModel model = random_model(d, m, 6, 0.5);
      for (int rep = 0; rep < 50; ++rep) {
        const Vec2 x{d.uniform(0.0, 1.0), d.uniform(0.0, 1.0)};
        double sum = 0.0;
        for (std::size_t idx = 0; idx < model.pattern_count(); ++idx) {
          sum += membership(model, SignPattern::from_index(m, idx), x, ActKind::sigmoid);
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    c.measured = worst;
    c.pass = worst < c.tolerance;
    out.push_back(c);
  }

  {  // inclusion-exclusion union area equals brute-force counting
    VerifyCheck c{"area-inclusion-exclusion", false, 0.0, 0.0};
    const GrayImage f = circle_image(seed + 2);
    double worst = 0.0;
    for (int m = 1; m <= 4; ++m) {
      const MultiphaseModel model = random_model(d, m, 6, 0.5);
      const double brute = area_union_brute(model, f);
      const double expanded = area_union_inclusion_exclusion(model, f, ActKind::heaviside);
      worst = std::max(worst, std::abs(brute - expanded));
    }
    c.measured = worst;
    c.pass = worst == 0.0;
    out.push_back(c);
  }

  return out;
}

}  // namespace nncv
