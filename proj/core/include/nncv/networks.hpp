#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "nncv/activations.hpp"
#include "nncv/vec.hpp"

namespace nncv {

/// Affine function x -> w.x + b. Its zero set is a line when w != 0.
struct AffineFn {
  Vec2 w;
  double b = 0.0;
  double operator()(Vec2 x) const { return dot(w, x) + b; }
};

/// Oriented line through p and q: positive on the left of p->q.
AffineFn line_through(Vec2 p, Vec2 q);

/// Line through p and q oriented so that `inside` evaluates positive.
AffineFn oriented_line(Vec2 p, Vec2 q, Vec2 inside);

/// Parameters of a one-layer network: n1 neurons, each an activated affine
/// function, combined linearly with output coefficients a.
struct LayerParams {
  std::vector<double> a;  // output coefficients
  std::vector<Vec2> w;    // row j: normal direction of neuron j
  std::vector<double> b;  // biases

  int size() const { return static_cast<int>(a.size()); }
  static LayerParams zeros(int n1);
};

/// Dense row-major matrix, just large enough for two-layer parameter blocks.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}
  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

/// Parameters of a two-layer network. Outer neuron i computes
///   act( sum_j A(i,j) * act(w_j . x + b_j) + D(i,0) )
/// and the outputs combine linearly with coefficients c. The offset block D
/// is stored as a full matrix mirroring the A block; rows are constant by
/// construction and evaluation reads the first column.
struct TwoLayerParams {
  std::vector<double> c;  // n2 output coefficients
  Mat A;                  // n2 x n1 inner combination weights
  Mat D;                  // n2 x n1 inner offsets (row-constant)
  std::vector<double> b;  // n1 biases of the first layer
  std::vector<Vec2> w;    // n1 normal directions of the first layer

  int inner_size() const { return static_cast<int>(b.size()); }
  int outer_size() const { return static_cast<int>(c.size()); }
  void validate() const;  // throws ShapeMismatch on inconsistent dimensions
};

double eval_one_layer(const LayerParams& p, Vec2 x, const Activation& act);

/// Exact spatial gradient of the sigmoid one-layer network,
///   sum_j a_j * sigmoid'(w_j.x + b_j) * w_j.
/// Throws HeavisideNotDifferentiable for the step activation.
Vec2 eval_one_layer_gradient(const LayerParams& p, Vec2 x, const Activation& act);
Vec2 eval_one_layer_gradient(const LayerParams& p, Vec2 x, Smoothing s);

double eval_two_layer(const TwoLayerParams& p, Vec2 x, const Activation& act);

/// Builds a two-layer step network equal to c_in on the open convex region
/// { inside_signs_j * lines_j > 0 for all j } and c_out on the open
/// complement. Inner coefficients are 1 and the inner offset is
/// -n1 + 1/3, which fires the outer step exactly when every half-plane test
/// passes. Requires at least 3 lines, each with w != 0.
TwoLayerParams build_polygon_indicator(const std::vector<AffineFn>& lines,
                                       const std::vector<int>& inside_signs,
                                       double c_in, double c_out);

/// One-layer network whose step-activated sign is positive exactly on the
/// open convex polygon with the given CCW vertices: unit coefficients for
/// every edge line plus one constant neuron shifting by -(n-1/2).
LayerParams polygon_level_set(const std::vector<Vec2>& vertices);

/// Inward-oriented edge lines of a convex polygon given by CCW vertices.
std::vector<AffineFn> polygon_edge_lines(const std::vector<Vec2>& vertices);

struct BoundingBox {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};
};

/// A line arrangement together with the sign vectors of its sampled open
/// regions. Entries of a sign vector are -1 or +1; probe points falling onto
/// a line (within 1e-12) are discarded.
struct Arrangement {
  std::vector<AffineFn> lines;
  std::set<std::vector<std::int8_t>> regions;
};

Arrangement enumerate_arrangement(const std::vector<AffineFn>& lines, BoundingBox box,
                                  int grid = 512);

/// Number of distinct open full-dimensional regions the lines cut the box
/// into, found by dense sign probing. At most n1(n1+1)/2 + 1 regions exist,
/// with equality for lines in general position (given a large enough box).
std::size_t count_arrangement_regions(const std::vector<AffineFn>& lines, BoundingBox box,
                                      int grid = 512);

/// True when no two lines are parallel and no three concurrent, both checked
/// numerically with the given tolerance.
bool general_position(const std::vector<AffineFn>& lines, double tol = 1e-9);

/// A parameter block paired with the activation it should be evaluated with.
template <typename Params>
struct WithActivation {
  Params params;
  Activation act;
};

/// Same parameters, smoothed activation. The evaluation converges to the
/// step-activated network in grid-L2 as epsilon decreases.
WithActivation<LayerParams> sigmoidize(const LayerParams& p, Smoothing s);
WithActivation<TwoLayerParams> sigmoidize(const TwoLayerParams& p, Smoothing s);

inline double eval(const WithActivation<LayerParams>& n, Vec2 x) {
  return eval_one_layer(n.params, x, n.act);
}
inline double eval(const WithActivation<TwoLayerParams>& n, Vec2 x) {
  return eval_two_layer(n.params, x, n.act);
}

}  // namespace nncv
