#include "nncv/baseline.hpp"

#include <cmath>

#include "nncv/errors.hpp"

namespace nncv {

namespace {

// Mirrored index: reflect(-1) = 1, reflect(n) = n-2. Realizes a zero normal
// derivative under central differences at border nodes.
inline int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

struct Gradients {
  std::vector<double> gx, gy;
};

Gradients central_gradients(const GridLevelSet& l) {
  const int W = l.width, H = l.height;
  const double hx = 1.0 / W, hy = 1.0 / H;
  Gradients g;
  g.gx.resize(l.values.size());
  g.gy.resize(l.values.size());
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * W + i;
      g.gx[p] = (l.at(reflect(i + 1, W), j) - l.at(reflect(i - 1, W), j)) / (2.0 * hx);
      g.gy[p] = (l.at(i, reflect(j + 1, H)) - l.at(i, reflect(j - 1, H))) / (2.0 * hy);
    }
  }
  return g;
}

}  // namespace

std::vector<double> curvature_divergence(const GridLevelSet& l) {
  const int W = l.width, H = l.height;
  const double hx = 1.0 / W, hy = 1.0 / H;
  const Gradients g = central_gradients(l);

  // Normalized gradient field, then its divergence.
  std::vector<double> nx(l.values.size()), ny(l.values.size());
  for (std::size_t p = 0; p < l.values.size(); ++p) {
    const double mag = std::sqrt(g.gx[p] * g.gx[p] + g.gy[p] * g.gy[p] + l.eta * l.eta);
    nx[p] = g.gx[p] / mag;
    ny[p] = g.gy[p] / mag;
  }
  std::vector<double> div(l.values.size());
  const auto at = [&](const std::vector<double>& v, int i, int j) {
    return v[static_cast<std::size_t>(reflect(j, H)) * W + reflect(i, W)];
  };
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * W + i;
      div[p] = (at(nx, i + 1, j) - at(nx, i - 1, j)) / (2.0 * hx) +
               (at(ny, i, j + 1) - at(ny, i, j - 1)) / (2.0 * hy);
    }
  }
  return div;
}

EvolveResult evolve(const GrayImage& f, int m, std::vector<GridLevelSet> init, int steps,
                    double mu, double nu, Smoothing eps) {
  f.validate();
  if (m != 1 && m != 2) throw UnsupportedPhases(m);
  if (static_cast<int>(init.size()) != m) {
    throw ShapeMismatch("one initial field per phase required");
  }
  for (const GridLevelSet& l : init) {
    if (l.width != f.width || l.height != f.height ||
        l.values.size() != f.pixel_count()) {
      throw ShapeMismatch("initial fields must match the image grid");
    }
    if (!(l.dt > 0.0) || !(l.eta > 0.0)) throw ConfigInvalid("dt and eta must be > 0");
    for (double v : l.values) {
      if (!std::isfinite(v)) throw ConfigInvalid("initial fields must be finite");
    }
  }

  const std::size_t n = f.pixel_count();
  const std::size_t patterns = std::size_t{1} << m;
  const double mu_internal = mu / static_cast<double>(std::max(f.width, f.height));

  EvolveResult out;
  out.fields = std::move(init);
  out.constants_trace.reserve(steps);

  std::vector<double> constants(patterns, 0.0);
  std::vector<std::vector<double>> values(m);

  for (int step = 1; step <= steps; ++step) {
    for (int k = 0; k < m; ++k) values[k] = out.fields[k].values;
    constants = region_means_from_values(values, f, eps, constants, ActKind::sigmoid);
    out.constants_trace.push_back(constants);

    // Double-buffered update: all reads see the fields from the step start.
    std::vector<std::vector<double>> next(m);
    for (int k = 0; k < m; ++k) {
      const GridLevelSet& l = out.fields[k];
      const std::vector<double> curv = curvature_divergence(l);
      next[k] = l.values;

      for (std::size_t p = 0; p < n; ++p) {
        const double lv = l.values[p];
        const double delta = sigmoid_derivative(lv, eps);

        // data forcing: signed squared residuals summed over patterns
        double force = 0.0;
        for (std::size_t idx = 0; idx < patterns; ++idx) {
          const int sign_k = (idx >> (m - 1 - k)) & 1 ? -1 : 1;
          const double r = constants[idx] - f.pixels[p];
          force += sign_k * r * r;
        }

        // area forcing: derivative of the union measure w.r.t. this field
        double area = 0.0;
        if (nu != 0.0) {
          double prod = 1.0;
          for (int l2 = 0; l2 < m; ++l2) {
            if (l2 != k) prod *= 1.0 - sigmoid(values[l2][p], eps);
          }
          area = prod;
        }

        next[k][p] = lv + l.dt * delta * (mu_internal * curv[p] - nu * area - force);
        if (!std::isfinite(next[k][p])) throw UnstableStep(step);
      }
    }
    for (int k = 0; k < m; ++k) out.fields[k].values = std::move(next[k]);
  }
  return out;
}

GridLevelSet signed_distance_circle(int width, int height, Vec2 center, double radius, double dt,
                                    double eta) {
  GridLevelSet l;
  l.width = width;
  l.height = height;
  l.dt = dt;
  l.eta = eta;
  l.values.resize(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const Vec2 x{(i + 0.5) / width, (j + 0.5) / height};
      l.at(i, j) = radius - norm(x - center);
    }
  }
  return l;
}

std::vector<GridLevelSet> default_evolution_init(int width, int height, int m) {
  if (m == 1) {
    return {signed_distance_circle(width, height, {0.5, 0.5}, 0.25)};
  }
  if (m == 2) {
    return {signed_distance_circle(width, height, {0.35, 0.5}, 0.22),
            signed_distance_circle(width, height, {0.65, 0.5}, 0.22)};
  }
  throw UnsupportedPhases(m);
}

LabelMask evolution_mask(const std::vector<GridLevelSet>& fields) {
  if (fields.empty()) throw EmptyInput("need at least one field");
  const int W = fields[0].width, H = fields[0].height;
  LabelMask mask(W, H);
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      std::size_t idx = 0;
      for (const GridLevelSet& l : fields) {
        idx = (idx << 1) | (l.at(i, j) < 0.0 ? 1 : 0);
      }
      mask.at(i, j) = static_cast<std::uint16_t>(idx);
    }
  }
  return mask;
}

}  // namespace nncv
