#include "nncv/multiphase.hpp"

#include <cmath>
#include <utility>

#include "nncv/errors.hpp"
#include "nncv/parallel.hpp"

namespace nncv {

SignPattern::SignPattern(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
  for (std::int8_t s : signs_) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign pattern entries must be +1 or -1");
  }
}

SignPattern SignPattern::from_index(int m, std::size_t index) {
  std::vector<std::int8_t> s(m);
  for (int k = 0; k < m; ++k) {
    s[k] = (index >> (m - 1 - k)) & 1 ? -1 : 1;
  }
  return SignPattern(std::move(s));
}

SignPattern SignPattern::parse(const std::string& text) {
  std::vector<std::int8_t> s;
  s.reserve(text.size());
  for (char c : text) {
    if (c == '+') {
      s.push_back(1);
    } else if (c == '-') {
      s.push_back(-1);
    } else {
      throw std::invalid_argument("sign pattern string may contain only '+' and '-'");
    }
  }
  return SignPattern(std::move(s));
}

std::size_t SignPattern::index() const {
  std::size_t idx = 0;
  for (std::int8_t s : signs_) idx = (idx << 1) | (s < 0 ? 1 : 0);
  return idx;
}

std::string SignPattern::to_string() const {
  std::string s;
  s.reserve(signs_.size());
  for (std::int8_t v : signs_) s.push_back(v > 0 ? '+' : '-');
  return s;
}

void MultiphaseModel::validate() const {
  if (m < 1 || m > 16) throw ConfigInvalid("phase count m must be in [1,16]");
  if (static_cast<int>(levelsets.size()) != m) {
    throw ShapeMismatch("model needs exactly m level-set networks");
  }
  for (const LayerParams& p : levelsets) {
    if (p.size() != n1 || static_cast<int>(p.w.size()) != n1 ||
        static_cast<int>(p.b.size()) != n1) {
      throw ShapeMismatch("every level-set network must have n1 neurons");
    }
  }
  if (constants.size() != pattern_count()) {
    throw ShapeMismatch("model needs exactly 2^m region constants");
  }
}

namespace {

inline Activation model_activation(const MultiphaseModel& model, ActKind kind) {
  return kind == ActKind::heaviside ? Activation::make_heaviside()
                                    : Activation::make_sigmoid(model.epsilon);
}

// Outer membership factor for one level-set value and sign.
inline double signed_factor(double value, int sign, Smoothing eps, ActKind kind) {
  const double v = sign > 0 ? value : -value;
  return kind == ActKind::heaviside ? heaviside(v) : sigmoid(v, eps);
}

// Membership of pattern `idx` from the per-level-set values at one point.
inline double pattern_product(std::span<const double> values, std::size_t idx, Smoothing eps,
                              ActKind kind) {
  const int m = static_cast<int>(values.size());
  double prod = 1.0;
  for (int k = 0; k < m; ++k) {
    const int sign = (idx >> (m - 1 - k)) & 1 ? -1 : 1;
    prod *= signed_factor(values[k], sign, eps, kind);
  }
  return prod;
}

}  // namespace

double membership_from_values(std::span<const double> levelset_values, const SignPattern& pattern,
                              Smoothing eps, ActKind kind) {
  if (pattern.size() != static_cast<int>(levelset_values.size())) {
    throw PatternLengthMismatch(pattern.size(), levelset_values.size());
  }
  double prod = 1.0;
  for (int k = 0; k < pattern.size(); ++k) {
    prod *= signed_factor(levelset_values[k], pattern.sign(k), eps, kind);
  }
  return prod;
}

double membership(const MultiphaseModel& model, const SignPattern& pattern, Vec2 x, ActKind kind) {
  if (pattern.size() != model.m) throw PatternLengthMismatch(pattern.size(), model.m);
  const Activation act = model_activation(model, kind);
  std::vector<double> values(model.m);
  for (int k = 0; k < model.m; ++k) {
    values[k] = eval_one_layer(model.levelsets[k], x, act);
  }
  return membership_from_values(values, pattern, model.epsilon, kind);
}

double eval_multiphase(const MultiphaseModel& model, Vec2 x, ActKind kind) {
  const Activation act = model_activation(model, kind);
  std::vector<double> values(model.m);
  for (int k = 0; k < model.m; ++k) {
    values[k] = eval_one_layer(model.levelsets[k], x, act);
  }
  double out = 0.0;
  for (std::size_t idx = 0; idx < model.pattern_count(); ++idx) {
    out += model.constants[idx] * pattern_product(values, idx, model.epsilon, kind);
  }
  return out;
}

std::vector<std::vector<double>> levelset_values(const MultiphaseModel& model, const GrayImage& f,
                                                 ActKind kind) {
  model.validate();
  const Activation act = model_activation(model, kind);
  std::vector<std::vector<double>> values(model.m);
  for (int k = 0; k < model.m; ++k) {
    values[k].resize(f.pixel_count());
  }
  struct Unit {};
  chunked_reduce<Unit>(
      f.pixel_count(), Unit{},
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
          const Vec2 x = f.center(p);
          for (int k = 0; k < model.m; ++k) {
            values[k][p] = eval_one_layer(model.levelsets[k], x, act);
          }
        }
        return Unit{};
      },
      [](Unit, Unit) { return Unit{}; });
  return values;
}

std::vector<double> region_means_from_values(const std::vector<std::vector<double>>& values,
                                             const GrayImage& f, Smoothing eps,
                                             const std::vector<double>& prev_constants,
                                             ActKind kind) {
  if (f.pixel_count() == 0) throw InvalidDims("region means need a non-empty image");
  const int m = static_cast<int>(values.size());
  const std::size_t patterns = std::size_t{1} << m;
  if (prev_constants.size() != patterns) {
    throw ShapeMismatch("previous constants must have one entry per pattern");
  }

  struct Sums {
    std::vector<double> num, den;
  };
  std::vector<double> at(m);
  Sums total = chunked_reduce<Sums>(
      f.pixel_count(), Sums{std::vector<double>(patterns, 0.0), std::vector<double>(patterns, 0.0)},
      [&](std::size_t begin, std::size_t end) {
        Sums s{std::vector<double>(patterns, 0.0), std::vector<double>(patterns, 0.0)};
        std::vector<double> local(m);
        for (std::size_t p = begin; p < end; ++p) {
          for (int k = 0; k < m; ++k) local[k] = values[k][p];
          const double fp = f.pixels[p];
          for (std::size_t idx = 0; idx < patterns; ++idx) {
            const double w = pattern_product(local, idx, eps, kind);
            s.num[idx] += fp * w;
            s.den[idx] += w;
          }
        }
        return s;
      },
      [patterns](Sums acc, Sums part) {
        for (std::size_t i = 0; i < patterns; ++i) {
          acc.num[i] += part.num[i];
          acc.den[i] += part.den[i];
        }
        return acc;
      });

  const double inv_n = 1.0 / static_cast<double>(f.pixel_count());
  std::vector<double> means(patterns);
  for (std::size_t idx = 0; idx < patterns; ++idx) {
    // Degenerate regions keep their previous constant instead of dividing
    // by a vanishing membership mass.
    if (total.den[idx] * inv_n < 1e-8) {
      means[idx] = prev_constants[idx];
    } else {
      means[idx] = total.num[idx] / total.den[idx];
    }
  }
  return means;
}

std::vector<double> region_means(const MultiphaseModel& model, const GrayImage& f, ActKind kind) {
  const auto values = levelset_values(model, f, kind);
  return region_means_from_values(values, f, model.epsilon, model.constants, kind);
}

LabelMask segmentation_mask(const MultiphaseModel& model, int width, int height, ActKind kind) {
  model.validate();
  if (width <= 0 || height <= 0) throw InvalidDims("mask dimensions must be positive");
  const Activation act = model_activation(model, kind);
  LabelMask mask(width, height);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const Vec2 x{(i + 0.5) / width, (j + 0.5) / height};
      std::size_t idx = 0;
      for (int k = 0; k < model.m; ++k) {
        const double v = eval_one_layer(model.levelsets[k], x, act);
        idx = (idx << 1) | (v < 0.0 ? 1 : 0);  // exact zero counts as positive
      }
      mask.at(i, j) = static_cast<std::uint16_t>(idx);
    }
  }
  return mask;
}

}  // namespace nncv
