#pragma once

#include <cstddef>
#include <vector>

#include "nncv/energy.hpp"
#include "nncv/multiphase.hpp"

namespace nncv {

/// Derivative of the energy with respect to one level-set network's
/// parameters; shapes mirror LayerParams. Also reused as a generic
/// parameter-shaped buffer (optimizer moments).
struct ParamGradient {
  std::vector<double> a;
  std::vector<Vec2> w;
  std::vector<double> b;

  static ParamGradient zeros_like(const LayerParams& p);
  int size() const { return static_cast<int>(a.size()); }
  /// Euclidean norm over all entries.
  double norm() const;
};

/// Gradients of all level-set networks for one batch of pixels.
struct EnergyGradient {
  std::vector<ParamGradient> levelsets;
  std::size_t batch_pixels = 0;

  double max_levelset_norm() const;
};

/// Exact derivative of the batch-restricted smoothed energy
/// (data + mu*length + nu*area, each averaged over the batch pixels) with
/// respect to every parameter of every level-set network. The region
/// constants are held fixed; they are re-estimated separately. |grad n| in
/// the length term carries a 1e-12 floor so the derivative exists at
/// vanishing spatial gradients.
EnergyGradient grad_energy(const MultiphaseModel& model, const GrayImage& f, double mu, double nu,
                           const std::vector<std::size_t>& batch);

/// Central-difference verification over every parameter on the full pixel
/// set. Returns the worst relative error with denominator
/// max(|analytic|, |numeric|, 1e-12).
double finite_difference_check(const MultiphaseModel& model, const GrayImage& f, double mu,
                               double nu, double step);

}  // namespace nncv
