#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nncv/image.hpp"
#include "nncv/networks.hpp"

namespace nncv {

/// One of the 2^m regions, selected by the signs of all m level-set
/// functions. Patterns enumerate deterministically: index 0 is all-plus and
/// flipping the last entry first ("+" orders before "-").
class SignPattern {
 public:
  explicit SignPattern(std::vector<std::int8_t> signs);
  static SignPattern from_index(int m, std::size_t index);
  static SignPattern parse(const std::string& text);  // e.g. "+-+"

  int size() const { return static_cast<int>(signs_.size()); }
  int sign(int k) const { return signs_[k]; }
  std::size_t index() const;
  std::string to_string() const;

  bool operator==(const SignPattern& o) const { return signs_ == o.signs_; }
  std::strong_ordering operator<=>(const SignPattern& o) const {
    return index() <=> o.index();
  }

 private:
  std::vector<std::int8_t> signs_;
};

/// Complete segmentation state: m one-layer level-set networks, one constant
/// per sign pattern (indexed by SignPattern::index) and the smoothing scale.
struct MultiphaseModel {
  int m = 1;
  int n1 = 1;
  Smoothing epsilon{0.5};
  std::vector<LayerParams> levelsets;  // size m, all with n1 neurons
  std::vector<double> constants;       // size 2^m

  std::size_t pattern_count() const { return std::size_t{1} << m; }
  double constant(const SignPattern& p) const { return constants[p.index()]; }
  void validate() const;  // throws ShapeMismatch / ConfigInvalid
};

/// Product of activated signed level-set values at x. With the step
/// activation this is the indicator of the pattern's region (away from zero
/// level-sets); with the sigmoid the memberships over all patterns sum to 1.
double membership(const MultiphaseModel& model, const SignPattern& pattern, Vec2 x,
                  ActKind kind);

/// Membership from precomputed level-set values, shared by the network and
/// grid code paths.
double membership_from_values(std::span<const double> levelset_values, const SignPattern& pattern,
                              Smoothing eps, ActKind kind);

/// The piecewise-constant multiphase function: sum over patterns of
/// constant * membership.
double eval_multiphase(const MultiphaseModel& model, Vec2 x, ActKind kind);

/// Membership-weighted means of f per pattern (Riemann sum over pixel
/// centers). Patterns with membership mass below 1e-8 keep prev_constants.
std::vector<double> region_means_from_values(const std::vector<std::vector<double>>& values,
                                             const GrayImage& f, Smoothing eps,
                                             const std::vector<double>& prev_constants,
                                             ActKind kind);

std::vector<double> region_means(const MultiphaseModel& model, const GrayImage& f,
                                 ActKind kind = ActKind::sigmoid);

/// Evaluates every level-set network at every pixel center; values[k] is the
/// row-major field of network k.
std::vector<std::vector<double>> levelset_values(const MultiphaseModel& model, const GrayImage& f,
                                                 ActKind kind = ActKind::sigmoid);

/// Per-pixel pattern labels from the level-set signs (an exact zero counts
/// as positive).
LabelMask segmentation_mask(const MultiphaseModel& model, int width, int height,
                            ActKind kind = ActKind::sigmoid);

}  // namespace nncv
