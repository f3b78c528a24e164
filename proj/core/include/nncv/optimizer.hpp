#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nncv/gradients.hpp"

namespace nncv {

/// Decoupled-weight-decay adaptive moment settings.
struct AdamWConfig {
  double lr = 0.2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-3;
};

/// First/second moment accumulators shaped like the level-set parameters.
struct OptimizerState {
  AdamWConfig cfg;
  long long step_count = 0;
  std::vector<ParamGradient> m1;
  std::vector<ParamGradient> m2;

  static OptimizerState init(const std::vector<LayerParams>& params, AdamWConfig cfg);
};

/// One bias-corrected update with decoupled decay:
///   theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * theta).
/// Throws ShapeMismatch if gradients do not match the parameters.
void adamw_step(OptimizerState& state, std::vector<LayerParams>& params,
                const std::vector<ParamGradient>& grads);

/// Everything one segmentation run needs. The length/area weights mu and nu
/// follow the pixel-grid convention (weights per pixel edge / per pixel);
/// the solver rescales the length weight by 1/max(width,height) onto the
/// unit-square energy internally.
struct RunConfig {
  int m = 1;
  int n1 = 32;
  double epsilon = 0.5;
  double mu = 0.5;
  double nu = 0.0;
  int batch = 1024;
  int iters = 200;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  double lr = 0.2;
  double weight_decay = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double init_std = 0.01;

  void validate() const;  // throws ConfigInvalid
  AdamWConfig adamw() const { return {lr, beta1, beta2, adam_eps, weight_decay}; }
  /// Unit-square length weight for a given grid.
  double internal_mu(int width, int height) const;
};

struct TraceRow {
  int iteration = 0;
  EnergyBreakdown energy;
  double grad_norm = 0.0;  // max over level-sets of the batch-gradient norm
};

struct SegmentationResult {
  MultiphaseModel model;
  std::vector<TraceRow> trace;
  bool early_stopped = false;
};

/// Width compensation for the initial output coefficients: keeps the initial
/// level-set amplitude at the level the hyperparameter defaults were
/// calibrated for (very wide hidden layers).
double init_coefficient_scale(int n1);

/// Draws parameters from a zero-mean normal with the given standard
/// deviation, in a fixed order so runs replay exactly. Direction entries are
/// scaled by w_scale (the init convention is per pixel coordinate; mapping
/// it onto the unit square multiplies directions by the image width) and
/// output coefficients by a_scale (see init_coefficient_scale). Without
/// these scalings every desk-size run starts in a flat saddle where the
/// region constants coincide.
std::vector<LayerParams> random_init(int m, int n1, double stddev, std::uint64_t seed,
                                     double w_scale = 1.0, double a_scale = 1.0);

/// Mini-batch minimization of the smoothed energy: sample a batch of pixels
/// (epoch-wise without replacement), take one optimizer step with the region
/// constants frozen, re-estimate the constants, log the full-image energy.
/// Stops after cfg.iters iterations or as soon as the largest per-level-set
/// gradient norm drops below cfg.tol.
SegmentationResult run_segmentation(const GrayImage& f, const RunConfig& cfg,
                                    const std::vector<LayerParams>* init = nullptr);

}  // namespace nncv
