#include "nncv/energy.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "nncv/errors.hpp"
#include "nncv/parallel.hpp"

namespace nncv {

namespace {

constexpr double kGradFloor = 1e-12;  // keeps |grad n| differentiable at 0

double union_area_from_mask_sizes(const std::vector<std::vector<std::uint8_t>>& masks, int m,
                                  std::size_t pixel_count) {
  // Every pattern except all-minus has at least one positive phase.
  const std::size_t all_minus = (std::size_t{1} << m) - 1;
  std::size_t covered = 0;
  for (std::size_t idx = 0; idx < masks.size(); ++idx) {
    if (idx == all_minus) continue;
    for (std::uint8_t v : masks[idx]) covered += v ? 1 : 0;
  }
  return static_cast<double>(covered) / static_cast<double>(pixel_count);
}

}  // namespace

std::string EnergyBreakdown::csv_row(int iteration) const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << iteration << ',' << data << ',' << length << ',' << area << ',' << total;
  return os.str();
}

EnergyBreakdown energy_region_form(const std::vector<std::vector<std::uint8_t>>& masks,
                                   const std::vector<double>& constants, const GrayImage& f,
                                   double mu, double nu) {
  f.validate();
  const std::size_t n = f.pixel_count();
  const std::size_t patterns = masks.size();
  if (patterns == 0 || constants.size() != patterns) {
    throw ShapeMismatch("one mask and one constant per sign pattern required");
  }
  int m = 0;
  while ((std::size_t{1} << m) < patterns) ++m;
  if ((std::size_t{1} << m) != patterns) {
    throw ShapeMismatch("mask count must be a power of two");
  }

  // Partition check and per-pixel labels in one pass.
  std::vector<std::uint32_t> label(n);
  for (std::size_t p = 0; p < n; ++p) {
    int owners = 0;
    for (std::size_t idx = 0; idx < patterns; ++idx) {
      if (p >= masks[idx].size()) throw ShapeMismatch("mask smaller than the pixel grid");
      if (masks[idx][p]) {
        ++owners;
        label[p] = static_cast<std::uint32_t>(idx);
      }
    }
    if (owners != 1) {
      throw NonPartition("pixel " + std::to_string(p) + " is covered by " +
                         std::to_string(owners) + " masks");
    }
  }

  EnergyBreakdown e;
  e.mu = mu;
  e.nu = nu;

  for (std::size_t p = 0; p < n; ++p) {
    const double r = constants[label[p]] - f.pixels[p];
    e.data += r * r;
  }
  e.data /= static_cast<double>(n);

  // Each 4-neighbour transition is one interface edge of length 1/max(W,H).
  const double edge_len = 1.0 / std::max(f.width, f.height);
  std::size_t transitions = 0;
  for (int j = 0; j < f.height; ++j) {
    for (int i = 0; i < f.width; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * f.width + i;
      if (i + 1 < f.width && label[p] != label[p + 1]) ++transitions;
      if (j + 1 < f.height && label[p] != label[p + f.width]) ++transitions;
    }
  }
  e.length = static_cast<double>(transitions) * edge_len;

  e.area = union_area_from_mask_sizes(masks, m, n);
  e.total = e.data + mu * e.length + nu * e.area;
  return e;
}

EnergyBreakdown energy_levelset(const MultiphaseModel& model, const GrayImage& f, double mu,
                                double nu) {
  model.validate();
  f.validate();
  const std::size_t n = f.pixel_count();
  const int m = model.m;
  const std::size_t patterns = model.pattern_count();
  const Smoothing eps = model.epsilon;
  const Activation act = Activation::make_sigmoid(eps);

  struct Sums {
    double data = 0.0, length = 0.0, area = 0.0;
  };
  Sums total = chunked_reduce<Sums>(
      n, Sums{},
      [&](std::size_t begin, std::size_t end) {
        Sums s;
        std::vector<double> values(m);
        for (std::size_t p = begin; p < end; ++p) {
          const Vec2 x = f.center(p);
          for (int k = 0; k < m; ++k) {
            values[k] = eval_one_layer(model.levelsets[k], x, act);
          }
          // data: squared residual weighted by the pattern membership
          for (std::size_t idx = 0; idx < patterns; ++idx) {
            double w = 1.0;
            for (int k = 0; k < m; ++k) {
              const double v = (idx >> (m - 1 - k)) & 1 ? -values[k] : values[k];
              w *= sigmoid(v, eps);
            }
            const double r = model.constants[idx] - f.pixels[p];
            s.data += r * r * w;
          }
          // length: smoothed delta times the spatial gradient magnitude
          for (int k = 0; k < m; ++k) {
            const Vec2 g = eval_one_layer_gradient(model.levelsets[k], x, eps);
            const double gn = std::sqrt(dot(g, g) + kGradFloor * kGradFloor);
            s.length += sigmoid_derivative(values[k], eps) * gn;
          }
          // area: alternating sums of membership products over subsets
          for (std::size_t sub = 1; sub < patterns; ++sub) {
            double prod = 1.0;
            int bits = 0;
            for (int k = 0; k < m; ++k) {
              if ((sub >> k) & 1) {
                prod *= sigmoid(values[k], eps);
                ++bits;
              }
            }
            s.area += (bits % 2 == 1 ? prod : -prod);
          }
        }
        return s;
      },
      [](Sums acc, Sums part) {
        acc.data += part.data;
        acc.length += part.length;
        acc.area += part.area;
        return acc;
      });

  EnergyBreakdown e;
  e.mu = mu;
  e.nu = nu;
  const double inv_n = 1.0 / static_cast<double>(n);
  e.data = total.data * inv_n;
  e.length = total.length * inv_n;
  e.area = total.area * inv_n;
  e.total = e.data + mu * e.length + nu * e.area;
  return e;
}

double area_union_brute(const MultiphaseModel& model, const GrayImage& f) {
  model.validate();
  const Activation act = Activation::make_heaviside();
  double covered = 0.0;
  for (std::size_t p = 0; p < f.pixel_count(); ++p) {
    const Vec2 x = f.center(p);
    for (int k = 0; k < model.m; ++k) {
      if (eval_one_layer(model.levelsets[k], x, act) > 0.0) {
        covered += 1.0;
        break;
      }
    }
  }
  return covered / static_cast<double>(f.pixel_count());
}

double area_union_inclusion_exclusion(const MultiphaseModel& model, const GrayImage& f,
                                      ActKind kind) {
  model.validate();
  const Smoothing eps = model.epsilon;
  const Activation act = kind == ActKind::heaviside ? Activation::make_heaviside()
                                                    : Activation::make_sigmoid(eps);
  const int m = model.m;
  const std::size_t subsets = model.pattern_count();
  double sum = 0.0;
  std::vector<double> values(m);
  for (std::size_t p = 0; p < f.pixel_count(); ++p) {
    const Vec2 x = f.center(p);
    for (int k = 0; k < m; ++k) {
      values[k] = eval_one_layer(model.levelsets[k], x, act);
    }
    for (std::size_t sub = 1; sub < subsets; ++sub) {
      double prod = 1.0;
      int bits = 0;
      for (int k = 0; k < m; ++k) {
        if ((sub >> k) & 1) {
          prod *= act(values[k]);
          ++bits;
        }
      }
      sum += (bits % 2 == 1 ? prod : -prod);
    }
  }
  return sum / static_cast<double>(f.pixel_count());
}

}  // namespace nncv
