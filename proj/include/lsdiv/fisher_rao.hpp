#pragma once

#include <complex>

#include "lsdiv/densities.hpp"

namespace lsdiv {

// Fisher information of a univariate location-scale family with respect to
// (l, s): I(l,s) = (1/s^2) [[a2, c], [c, b2]], curvature kappa = -1/b2.
struct FisherMetric {
  double a2 = 0.0;
  double b2 = 0.0;
  double c = 0.0;
  double curvature = 0.0;
  bool even_density = false;
};

// a2 = E[(p'/p)^2], b2 = E[(1 + x p'/p)^2], c = E[(p'/p)(1 + x p'/p)] by
// quadrature. Requires a regular, continuously differentiable standard
// density with full support R. For even densities |c| < 1e-7 is snapped to
// exactly 0 (odd integrand).
FisherMetric fisher_constants(const StandardDensity& p, double tol = 1e-8);

Matrix fisher_matrix(const FisherMetric& m, double l, double s);  // 2x2, s > 0

// b * d_U(((a/b) l1, s1), ((a/b) l2, s2)) with the unit-curvature
// upper-half-plane distance d_U = arccosh(1 + (dx^2 + dy^2)/(2 y1 y2)).
// Requires an even standard density (diagonal metric, c = 0).
double fisher_rao_distance(const FisherMetric& m, double l1, double s1, double l2, double s2);

enum class HyperbolicModel { upper_plane, poincare_disk, klein_disk };

struct HyperbolicPoint {
  HyperbolicModel model = HyperbolicModel::upper_plane;
  double x = 0.0;
  double y = 1.0;
};

// Validates the model invariant (y > 0 for the upper plane, |w| < 1 for the
// disks); boundary points are rejected.
HyperbolicPoint make_point(HyperbolicModel model, double x, double y);

// upper <-> Poincare disk via the Cayley map (z-i)/(z+i) and its inverse
// i(1+w)/(1-w); Poincare <-> Klein via k = 2w/(1+|w|^2) and
// w = k/(1+sqrt(1-|k|^2)).
HyperbolicPoint convert(const HyperbolicPoint& p, HyperbolicModel target);

// Unit-curvature hyperbolic distance in the points' common model.
double model_distance(const HyperbolicPoint& a, const HyperbolicPoint& b);

// z -> (m00 z + m01)/(m10 z + m11) for det(m) = 1 (within 1e-10).
std::complex<double> mobius_apply(const Eigen::Matrix2cd& m, std::complex<double> z);

// Conjugation A -> C A C^{-1} with C = [[1,-i],[1,i]], carrying SL(2,R)
// upper-plane isometries onto SU(1,1) disk isometries.
Eigen::Matrix2cd sl2_to_su11(const Eigen::Matrix2cd& m);

}  // namespace lsdiv
