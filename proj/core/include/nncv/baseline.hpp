#pragma once

#include <vector>

#include "nncv/image.hpp"
#include "nncv/multiphase.hpp"

namespace nncv {

/// Pixel-wise level-set field for the classical evolution, with its time
/// step and the floor keeping |grad| positive inside the curvature term.
struct GridLevelSet {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, same layout as GrayImage
  double dt = 0.1;
  double eta = 1e-6;

  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * width + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * width + i]; }
};

struct EvolveResult {
  std::vector<GridLevelSet> fields;
  std::vector<std::vector<double>> constants_trace;  // per step, 2^m region means
};

/// Classical explicit level-set evolution of the segmentation energy on the
/// pixel grid (supported for m in {1,2}): each field moves by the smoothed
/// delta times curvature, area and data forcing, with mirrored (zero normal
/// derivative) boundaries; the region constants are re-estimated from the
/// smoothed memberships every step. mu follows the same pixel-grid
/// convention as RunConfig. Throws UnstableStep when a field stops being
/// finite.
EvolveResult evolve(const GrayImage& f, int m, std::vector<GridLevelSet> init, int steps,
                    double mu, double nu, Smoothing eps);

/// div(grad l / |grad l|_eta) by central differences with mirrored borders.
std::vector<double> curvature_divergence(const GridLevelSet& field);

/// Signed distance to a circle, positive inside.
GridLevelSet signed_distance_circle(int width, int height, Vec2 center, double radius,
                                    double dt = 0.1, double eta = 1e-6);

/// Default initial fields: one centered circle of radius 0.25 for m=1, two
/// horizontally offset circles for m=2.
std::vector<GridLevelSet> default_evolution_init(int width, int height, int m);

/// Per-pixel pattern labels from the field signs (zero counts as positive).
LabelMask evolution_mask(const std::vector<GridLevelSet>& fields);

}  // namespace nncv
