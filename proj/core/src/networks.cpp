#include "nncv/networks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nncv/errors.hpp"

namespace nncv {

AffineFn line_through(Vec2 p, Vec2 q) {
  const Vec2 n = perp(q - p);
  return AffineFn{n, -dot(n, p)};
}

AffineFn oriented_line(Vec2 p, Vec2 q, Vec2 inside) {
  AffineFn f = line_through(p, q);
  if (f(inside) < 0.0) {
    f.w = -1.0 * f.w;
    f.b = -f.b;
  }
  return f;
}

LayerParams LayerParams::zeros(int n1) {
  LayerParams p;
  p.a.assign(n1, 0.0);
  p.w.assign(n1, Vec2{});
  p.b.assign(n1, 0.0);
  return p;
}

void TwoLayerParams::validate() const {
  const int n2 = outer_size();
  const int n1 = inner_size();
  if (static_cast<int>(w.size()) != n1 || A.rows != n2 || A.cols != n1 || D.rows != n2 ||
      D.cols != n1) {
    throw ShapeMismatch("two-layer parameter blocks have inconsistent dimensions");
  }
}

double eval_one_layer(const LayerParams& p, Vec2 x, const Activation& act) {
  double out = 0.0;
  for (int j = 0; j < p.size(); ++j) {
    out += p.a[j] * act(dot(p.w[j], x) + p.b[j]);
  }
  return out;
}

Vec2 eval_one_layer_gradient(const LayerParams& p, Vec2 x, const Activation& act) {
  if (!act.is_sigmoid()) throw HeavisideNotDifferentiable();
  return eval_one_layer_gradient(p, x, act.smoothing());
}

Vec2 eval_one_layer_gradient(const LayerParams& p, Vec2 x, Smoothing s) {
  Vec2 g{};
  for (int j = 0; j < p.size(); ++j) {
    const double d = p.a[j] * sigmoid_derivative(dot(p.w[j], x) + p.b[j], s);
    g += d * p.w[j];
  }
  return g;
}

double eval_two_layer(const TwoLayerParams& p, Vec2 x, const Activation& act) {
  p.validate();
  const int n1 = p.inner_size();
  const int n2 = p.outer_size();
  std::vector<double> inner(n1);
  for (int j = 0; j < n1; ++j) {
    inner[j] = act(dot(p.w[j], x) + p.b[j]);
  }
  double out = 0.0;
  for (int i = 0; i < n2; ++i) {
    double arg = n1 > 0 ? p.D.at(i, 0) : 0.0;
    for (int j = 0; j < n1; ++j) {
      arg += p.A.at(i, j) * inner[j];
    }
    out += p.c[i] * act(arg);
  }
  return out;
}

TwoLayerParams build_polygon_indicator(const std::vector<AffineFn>& lines,
                                       const std::vector<int>& inside_signs, double c_in,
                                       double c_out) {
  const int n1 = static_cast<int>(lines.size());
  if (n1 < 3) throw std::invalid_argument("polygon indicator needs at least 3 lines");
  if (inside_signs.size() != lines.size()) {
    throw ShapeMismatch("one inside sign per line required");
  }
  for (const AffineFn& l : lines) {
    if (l.w.x == 0.0 && l.w.y == 0.0) {
      throw DegenerateLines("line with zero normal direction");
    }
  }

  // Inner neurons test sign_j * line_j > 0; the outer offset puts the step
  // threshold between n1 (all tests pass) and n1 - 1/2 (best failing value).
  const double kappa = -static_cast<double>(n1) + 1.0 / 3.0;
  TwoLayerParams p;
  p.w.resize(n1);
  p.b.resize(n1);
  for (int j = 0; j < n1; ++j) {
    const double s = inside_signs[j] >= 0 ? 1.0 : -1.0;
    p.w[j] = s * lines[j].w;
    p.b[j] = s * lines[j].b;
  }
  p.c = {c_in, c_out};
  p.A = Mat(2, n1);
  p.D = Mat(2, n1);
  for (int j = 0; j < n1; ++j) {
    p.A.at(0, j) = 1.0;
    p.A.at(1, j) = -1.0;
    p.D.at(0, j) = kappa;
    p.D.at(1, j) = -kappa;
  }
  return p;
}

std::vector<AffineFn> polygon_edge_lines(const std::vector<Vec2>& vertices) {
  const int n = static_cast<int>(vertices.size());
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  std::vector<AffineFn> lines(n);
  for (int i = 0; i < n; ++i) {
    // CCW orientation puts the interior on the left of every edge.
    lines[i] = line_through(vertices[i], vertices[(i + 1) % n]);
  }
  return lines;
}

LayerParams polygon_level_set(const std::vector<Vec2>& vertices) {
  const std::vector<AffineFn> lines = polygon_edge_lines(vertices);
  const int n = static_cast<int>(lines.size());
  LayerParams p;
  p.a.assign(n + 1, 1.0);
  p.w.resize(n + 1);
  p.b.resize(n + 1);
  for (int j = 0; j < n; ++j) {
    p.w[j] = lines[j].w;
    p.b[j] = lines[j].b;
  }
  // Constant neuron: step(1) = 1 regardless of x. The shift makes the sum
  // positive only when every edge test passes.
  p.w[n] = Vec2{0.0, 0.0};
  p.b[n] = 1.0;
  p.a[n] = -(static_cast<double>(n) - 0.5);
  return p;
}

Arrangement enumerate_arrangement(const std::vector<AffineFn>& lines, BoundingBox box,
                                  int grid) {
  if (lines.empty()) throw EmptyInput("arrangement needs at least one line");
  Arrangement arr;
  arr.lines = lines;
  const int n = static_cast<int>(lines.size());
  const double dx = (box.hi.x - box.lo.x) / grid;
  const double dy = (box.hi.y - box.lo.y) / grid;
  std::vector<std::int8_t> signs(n);
  for (int iy = 0; iy < grid; ++iy) {
    for (int ix = 0; ix < grid; ++ix) {
      const Vec2 x{box.lo.x + (ix + 0.5) * dx, box.lo.y + (iy + 0.5) * dy};
      bool on_line = false;
      for (int j = 0; j < n; ++j) {
        const double v = lines[j](x);
        if (std::abs(v) < 1e-12) {
          on_line = true;
          break;
        }
        signs[j] = v > 0.0 ? 1 : -1;
      }
      if (!on_line) arr.regions.insert(signs);
    }
  }
  return arr;
}

std::size_t count_arrangement_regions(const std::vector<AffineFn>& lines, BoundingBox box,
                                      int grid) {
  return enumerate_arrangement(lines, box, grid).regions.size();
}

bool general_position(const std::vector<AffineFn>& lines, double tol) {
  const int n = static_cast<int>(lines.size());
  struct Pt {
    double x, y;
  };
  std::vector<Pt> cuts;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec2 wi = lines[i].w, wj = lines[j].w;
      const double det = wi.x * wj.y - wi.y * wj.x;
      const double scale = norm(wi) * norm(wj);
      if (std::abs(det) <= tol * std::max(scale, 1e-300)) return false;  // parallel pair
      const double px = (-lines[i].b * wj.y + lines[j].b * wi.y) / det;
      const double py = (-wi.x * lines[j].b + wj.x * lines[i].b) / det;
      cuts.push_back({px, py});
    }
  }
  // Concurrent triple <=> two pairwise intersection points coincide.
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    for (std::size_t j = i + 1; j < cuts.size(); ++j) {
      const double d = std::hypot(cuts[i].x - cuts[j].x, cuts[i].y - cuts[j].y);
      if (d <= tol) return false;
    }
  }
  return true;
}

WithActivation<LayerParams> sigmoidize(const LayerParams& p, Smoothing s) {
  return {p, Activation::make_sigmoid(s)};
}

WithActivation<TwoLayerParams> sigmoidize(const TwoLayerParams& p, Smoothing s) {
  return {p, Activation::make_sigmoid(s)};
}

}  // namespace nncv
