#pragma once

#include <cmath>
#include <stdexcept>

namespace nncv {

/// Slope scale of the smoothed step. The sigmoid approaches the hard step as
/// epsilon goes to zero.
struct Smoothing {
  double epsilon;
  explicit Smoothing(double eps) : epsilon(eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("smoothing epsilon must be > 0");
  }
};

/// Hard step: 1 for x>0, 1/2 for x=0, 0 for x<0. Both signed zeros take the
/// middle branch.
inline double heaviside(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return 0.0;
  return 0.5;
}

/// Smoothed step 1/(1+exp(-x/eps)), evaluated in two branches so exp never
/// overflows for finite x.
inline double sigmoid(double x, Smoothing s) {
  const double t = x / s.epsilon;
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// Both sigmoid(x) and sigmoid(-x) from a single exp, bitwise identical to
/// the two separate calls.
inline void sigmoid_pair(double x, Smoothing s, double& pos, double& neg) {
  const double t = x / s.epsilon;
  const double e = std::exp(-std::abs(t));
  const double big = 1.0 / (1.0 + e);
  const double small = e / (1.0 + e);
  pos = t >= 0.0 ? big : small;
  neg = t >= 0.0 ? small : big;
}

/// Exact derivative of sigmoid(): (1/eps) * s(x) * s(-x). Strictly positive
/// and exactly even in x; this is the smoothed delta weighting the length
/// integral.
inline double sigmoid_derivative(double x, Smoothing s) {
  double pos, neg;
  sigmoid_pair(x, s, pos, neg);
  return pos * neg / s.epsilon;
}

/// Second derivative of sigmoid(): (1/eps^2) * s(x) * s(-x) * (s(-x)-s(x)).
inline double sigmoid_second_derivative(double x, Smoothing s) {
  double pos, neg;
  sigmoid_pair(x, s, pos, neg);
  return pos * neg * (neg - pos) / (s.epsilon * s.epsilon);
}

enum class ActKind { heaviside, sigmoid };

/// Activation choice passed around evaluation routines: either the hard step
/// or the smoothed step with a fixed epsilon.
struct Activation {
  ActKind kind = ActKind::heaviside;
  double epsilon = 1.0;  // meaningful only for the sigmoid kind

  static Activation make_heaviside() { return {ActKind::heaviside, 1.0}; }
  static Activation make_sigmoid(Smoothing s) { return {ActKind::sigmoid, s.epsilon}; }

  bool is_sigmoid() const { return kind == ActKind::sigmoid; }
  Smoothing smoothing() const { return Smoothing(epsilon); }

  double operator()(double x) const {
    return kind == ActKind::heaviside ? heaviside(x) : sigmoid(x, Smoothing(epsilon));
  }
};

}  // namespace nncv
