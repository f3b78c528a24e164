#include "nncv/gradients.hpp"

#include <cmath>

#include "nncv/errors.hpp"
#include "nncv/parallel.hpp"

namespace nncv {

namespace {

constexpr double kGradFloor = 1e-12;

struct NeuronEval {
  double act;     // sigmoid(w.x + b)
  double d1;      // first derivative at the pre-activation
  double d2;      // second derivative at the pre-activation
};

}  // namespace

ParamGradient ParamGradient::zeros_like(const LayerParams& p) {
  ParamGradient g;
  g.a.assign(p.a.size(), 0.0);
  g.w.assign(p.w.size(), Vec2{});
  g.b.assign(p.b.size(), 0.0);
  return g;
}

double ParamGradient::norm() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  for (Vec2 v : w) s += dot(v, v);
  for (double v : b) s += v * v;
  return std::sqrt(s);
}

double EnergyGradient::max_levelset_norm() const {
  double worst = 0.0;
  for (const ParamGradient& g : levelsets) worst = std::max(worst, g.norm());
  return worst;
}

EnergyGradient grad_energy(const MultiphaseModel& model, const GrayImage& f, double mu, double nu,
                           const std::vector<std::size_t>& batch) {
  model.validate();
  if (batch.empty()) throw EmptyBatch();
  const int m = model.m;
  const int n1 = model.n1;
  const std::size_t patterns = model.pattern_count();
  const Smoothing eps = model.epsilon;

  auto zero_grads = [&] {
    std::vector<ParamGradient> gs;
    gs.reserve(m);
    for (int k = 0; k < m; ++k) gs.push_back(ParamGradient::zeros_like(model.levelsets[k]));
    return gs;
  };

  std::vector<ParamGradient> total = chunked_reduce<std::vector<ParamGradient>>(
      batch.size(), zero_grads(),
      [&](std::size_t begin, std::size_t end) {
        std::vector<ParamGradient> gs = zero_grads();
        std::vector<std::vector<NeuronEval>> units(m, std::vector<NeuronEval>(n1));
        std::vector<double> value(m), splus(m), sminus(m), delta(m);
        std::vector<Vec2> grad(m);
        std::vector<double> gnorm(m);

        for (std::size_t bi = begin; bi < end; ++bi) {
          const std::size_t p = batch[bi];
          const Vec2 x = f.center(p);
          const double fp = f.pixels[p];

          // Forward pass: per-neuron activations and the per-level-set
          // value, membership factors and spatial gradient.
          for (int k = 0; k < m; ++k) {
            const LayerParams& lp = model.levelsets[k];
            double v = 0.0;
            Vec2 g{};
            for (int j = 0; j < n1; ++j) {
              const double z = dot(lp.w[j], x) + lp.b[j];
              NeuronEval& u = units[k][j];
              double zn;
              sigmoid_pair(z, eps, u.act, zn);
              u.d1 = u.act * zn / eps.epsilon;
              u.d2 = u.d1 * (zn - u.act) / eps.epsilon;
              v += lp.a[j] * u.act;
              g += (lp.a[j] * u.d1) * lp.w[j];
            }
            value[k] = v;
            sigmoid_pair(v, eps, splus[k], sminus[k]);
            delta[k] = splus[k] * sminus[k] / eps.epsilon;
            grad[k] = g;
            gnorm[k] = std::sqrt(dot(g, g) + kGradFloor * kGradFloor);
          }

          for (int k = 0; k < m; ++k) {
            // dE_data/dn_k: signed residual sums over patterns with the
            // membership product excluding factor k.
            double data_coeff = 0.0;
            for (std::size_t idx = 0; idx < patterns; ++idx) {
              const int sign_k = (idx >> (m - 1 - k)) & 1 ? -1 : 1;
              double prod = 1.0;
              for (int l = 0; l < m; ++l) {
                if (l == k) continue;
                prod *= (idx >> (m - 1 - l)) & 1 ? sminus[l] : splus[l];
              }
              const double r = model.constants[idx] - fp;
              data_coeff += sign_k * r * r * prod;
            }

            // dE_area/dn_k: derivative of 1 - prod(1 - splus).
            double area_coeff = 0.0;
            if (nu != 0.0) {
              double prod = 1.0;
              for (int l = 0; l < m; ++l) {
                if (l != k) prod *= sminus[l];
              }
              area_coeff = prod;
            }

            // Chain rule pieces: A1 multiplies dn/dtheta, V multiplies
            // dgrad/dtheta.
            const double sigma2 = delta[k] * (sminus[k] - splus[k]) / eps.epsilon;
            const double a1 = delta[k] * data_coeff + mu * sigma2 * gnorm[k] +
                              nu * delta[k] * area_coeff;
            const Vec2 vvec = (mu * delta[k] / gnorm[k]) * grad[k];

            const LayerParams& lp = model.levelsets[k];
            ParamGradient& g = gs[k];
            for (int j = 0; j < n1; ++j) {
              const NeuronEval& u = units[k][j];
              g.a[j] += a1 * u.act + u.d1 * dot(vvec, lp.w[j]);
              const double inner = a1 * u.d1 + u.d2 * dot(vvec, lp.w[j]);
              g.b[j] += lp.a[j] * inner;
              g.w[j] += lp.a[j] * (inner * x + u.d1 * vvec);
            }
          }
        }
        return gs;
      },
      [&](std::vector<ParamGradient> acc, std::vector<ParamGradient> part) {
        for (int k = 0; k < m; ++k) {
          for (int j = 0; j < n1; ++j) {
            acc[k].a[j] += part[k].a[j];
            acc[k].w[j] += part[k].w[j];
            acc[k].b[j] += part[k].b[j];
          }
        }
        return acc;
      });

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (ParamGradient& g : total) {
    for (double& v : g.a) v *= inv_b;
    for (Vec2& v : g.w) v = inv_b * v;
    for (double& v : g.b) v *= inv_b;
  }
  return EnergyGradient{std::move(total), batch.size()};
}

double finite_difference_check(const MultiphaseModel& model, const GrayImage& f, double mu,
                               double nu, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  std::vector<std::size_t> all(f.pixel_count());
  for (std::size_t p = 0; p < all.size(); ++p) all[p] = p;
  const EnergyGradient analytic = grad_energy(model, f, mu, nu, all);

  MultiphaseModel probe = model;
  const auto energy_at = [&]() { return energy_levelset(probe, f, mu, nu).total; };
  const auto central = [&](double& param) {
    const double saved = param;
    param = saved + step;
    const double hi = energy_at();
    param = saved - step;
    const double lo = energy_at();
    param = saved;
    return (hi - lo) / (2.0 * step);
  };

  double worst = 0.0;
  const auto record = [&](double a, double n) {
    const double denom = std::max({std::abs(a), std::abs(n), 1e-12});
    worst = std::max(worst, std::abs(a - n) / denom);
  };

  for (int k = 0; k < model.m; ++k) {
    LayerParams& lp = probe.levelsets[k];
    const ParamGradient& g = analytic.levelsets[k];
    for (int j = 0; j < model.n1; ++j) {
      record(g.a[j], central(lp.a[j]));
      record(g.w[j].x, central(lp.w[j].x));
      record(g.w[j].y, central(lp.w[j].y));
      record(g.b[j], central(lp.b[j]));
    }
  }
  return worst;
}

}  // namespace nncv
