#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nncv/multiphase.hpp"

namespace nncv {

/// The three contributions to the segmentation energy plus their weighted
/// total: total = data + mu*length + nu*area.
struct EnergyBreakdown {
  double data = 0.0;
  double length = 0.0;
  double area = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double total = 0.0;

  /// One CSV row "iteration,data,length,area,total".
  std::string csv_row(int iteration) const;
};

/// Energy of an explicit region decomposition: squared residuals against the
/// per-region constants, boundary length estimated from 4-neighbour label
/// transitions (each interface edge counted once, edge length
/// 1/max(width,height)), and the measure of the union of all patterns with at
/// least one positive sign. The masks must partition the pixel grid.
EnergyBreakdown energy_region_form(const std::vector<std::vector<std::uint8_t>>& masks,
                                   const std::vector<double>& constants, const GrayImage& f,
                                   double mu, double nu);

/// Smoothed level-set energy of a sigmoid-activated model. All integrals are
/// Riemann sums over pixel centers with weight 1/(width*height):
///   data   = sum over patterns of (c - f)^2 * membership,
///   length = sum over level-sets of sigmoid'(n_k) * |grad n_k|,
///   area   = inclusion-exclusion over non-empty subsets of positive phases.
EnergyBreakdown energy_levelset(const MultiphaseModel& model, const GrayImage& f, double mu,
                                double nu);

/// Measure of the union of the positive phases by directly counting pixels
/// where any step-activated level-set is positive. Oracle for the
/// inclusion-exclusion expansion.
double area_union_brute(const MultiphaseModel& model, const GrayImage& f);

/// Inclusion-exclusion expansion of the union measure with a selectable
/// activation. For the step activation it matches area_union_brute exactly
/// whenever no pixel center sits on a zero level-set.
double area_union_inclusion_exclusion(const MultiphaseModel& model, const GrayImage& f,
                                      ActKind kind);

}  // namespace nncv
