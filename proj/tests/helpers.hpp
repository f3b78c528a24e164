#pragma once

// Shared generators and independent oracles for the test suites. Everything
// here stays deliberately separate from the library code paths it checks.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "nncv/multiphase.hpp"
#include "nncv/networks.hpp"

namespace nncv::testing {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

// Network whose neuron lines cross the unit square, with O(1) coefficients
// so gradients stay well conditioned. The last neuron is a constant unit:
// it keeps the step-activated network value nonzero almost everywhere
// (otherwise the all-lines-negative cell evaluates to exactly zero, where
// the step's 1/2 branch would make the zero level-set fat).
inline LayerParams random_network(Rng& rng, int n1, double coeff_scale = 0.8) {
  LayerParams p;
  p.a.resize(n1);
  p.w.resize(n1);
  p.b.resize(n1);
  for (int j = 0; j + 1 < n1; ++j) {
    p.a[j] = rng.uniform(-coeff_scale, coeff_scale);
    const double theta = rng.uniform(0.0, 6.283185307179586);
    const double mag = rng.uniform(0.5, 2.0);
    p.w[j] = {mag * std::cos(theta), mag * std::sin(theta)};
    const Vec2 anchor{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    p.b[j] = -dot(p.w[j], anchor);
  }
  const int last = n1 - 1;
  double offset = rng.uniform(0.05, 0.4) * coeff_scale;
  if (rng.uniform(0.0, 1.0) < 0.5) offset = -offset;
  p.a[last] = offset;
  p.w[last] = {0.0, 0.0};
  p.b[last] = 1.0;
  return p;
}

inline MultiphaseModel random_model(Rng& rng, int m, int n1, double eps,
                                    double coeff_scale = 0.8) {
  MultiphaseModel model;
  model.m = m;
  model.n1 = n1;
  model.epsilon = Smoothing(eps);
  for (int k = 0; k < m; ++k) model.levelsets.push_back(random_network(rng, n1, coeff_scale));
  model.constants.resize(model.pattern_count());
  for (double& c : model.constants) c = rng.uniform(0.0, 1.0);
  return model;
}

// Convex polygon: vertices in angular order on a jittered ellipse.
inline std::vector<Vec2> random_convex_polygon(Rng& rng, int edges) {
  const Vec2 center{rng.uniform(0.35, 0.65), rng.uniform(0.35, 0.65)};
  const double rx = rng.uniform(0.15, 0.28);
  const double ry = rng.uniform(0.15, 0.28);
  std::vector<Vec2> vertices;
  for (int i = 0; i < edges; ++i) {
    const double theta = 2.0 * 3.14159265358979323846 * (i + 0.2 + 0.6 * rng.uniform(0.0, 1.0)) /
                         edges;
    vertices.push_back({center.x + rx * std::cos(theta), center.y + ry * std::sin(theta)});
  }
  return vertices;
}

// Purely geometric point-in-polygon test for CCW convex vertices: x is
// strictly inside iff it lies strictly left of every directed edge.
inline bool point_in_convex_polygon(const std::vector<Vec2>& vertices, Vec2 x) {
  const int n = static_cast<int>(vertices.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[(i + 1) % n];
    const double cross = (b.x - a.x) * (x.y - a.y) - (b.y - a.y) * (x.x - a.x);
    if (cross <= 0.0) return false;
  }
  return true;
}

// Distance from x to the line through a and b.
inline double line_distance(Vec2 a, Vec2 b, Vec2 x) {
  const Vec2 d = b - a;
  return std::abs(d.x * (x.y - a.y) - d.y * (x.x - a.x)) / norm(d);
}

// Root-mean-square difference over an s x s pixel-center grid of the unit
// square (grid-L2 distance).
inline double grid_l2(const std::function<double(Vec2)>& fa,
                      const std::function<double(Vec2)>& fb, int s = 200) {
  double sum = 0.0;
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < s; ++i) {
      const Vec2 x{(i + 0.5) / s, (j + 0.5) / s};
      const double d = fa(x) - fb(x);
      sum += d * d;
    }
  }
  return std::sqrt(sum / (static_cast<double>(s) * s));
}

// Adaptive Simpson quadrature, the reference integrator for the scalar
// convergence checks.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 30) {
  const auto simpson = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
  };
  std::function<double(double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                               int d) {
    const double mid = 0.5 * (lo + hi);
    const double left = simpson(lo, mid);
    const double right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
      return left + right + (left + right - whole) / 15.0;
    }
    return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
  };
  return rec(a, b, simpson(a, b), depth);
}

// Length of the chord {w.x + b = 0} intersected with the unit square.
inline double chord_length_unit_square(Vec2 w, double b) {
  std::vector<Vec2> pts;
  const auto consider = [&](Vec2 p) {
    if (p.x >= -1e-12 && p.x <= 1.0 + 1e-12 && p.y >= -1e-12 && p.y <= 1.0 + 1e-12) {
      for (const Vec2& q : pts) {
        if (norm(p - q) < 1e-9) return;
      }
      pts.push_back(p);
    }
  };
  if (std::abs(w.y) > 1e-300) {
    consider({0.0, -b / w.y});
    consider({1.0, -(b + w.x) / w.y});
  }
  if (std::abs(w.x) > 1e-300) {
    consider({-b / w.x, 0.0});
    consider({-(b + w.y) / w.x, 1.0});
  }
  if (pts.size() < 2) return 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::max(best, norm(pts[i] - pts[j]));
    }
  }
  return best;
}

}  // namespace nncv::testing
