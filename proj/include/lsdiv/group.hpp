#pragma once

#include "lsdiv/linalg.hpp"

namespace lsdiv {

// Element g_{l,P} of the multivariate location-scale group R^d x P_++.
// The scale block is SPD on the public construction path; compositions of
// SPD factors may produce a general invertible scale, which is kept exact
// and only used transiently inside reductions.
class GroupElement {
 public:
  GroupElement(double l, double s);            // d = 1, s > 0
  GroupElement(Vector l, const SpdMatrix& p);
  static GroupElement identity(Eigen::Index d);
  static GroupElement with_general_scale(Vector l, Matrix p);

  Eigen::Index dim() const { return loc_.size(); }
  const Vector& loc() const { return loc_; }
  const Matrix& scale() const { return scale_; }

  // d == 1 accessors; throw std::domain_error otherwise.
  double loc1() const;
  double scale1() const;

  bool scale_is_spd(double rel_tol = 1e-9) const;
  bool is_identity(double tol = 0.0) const;

 private:
  GroupElement(Vector l, Matrix p, int /*unchecked tag*/);
  Vector loc_;
  Matrix scale_;
};

// g2.g1 = g_{l2 + P2 l1, P2 P1}; the first argument acts last.
GroupElement compose(const GroupElement& g2, const GroupElement& g1);
GroupElement inverse(const GroupElement& g);

// (d+1)x(d+1) block matrix [[P, l], [0, 1]].
Matrix as_matrix(const GroupElement& g);
GroupElement from_matrix(const Matrix& m);  // validates the bottom row

Vector act_on_point(const GroupElement& g, const Vector& x);  // P x + l
Vector pull_back(const GroupElement& g, const Vector& y);     // P^{-1}(y - l)
double act_on_point(const GroupElement& g, double x);
double pull_back(const GroupElement& g, double y);

// g1^{-1}.g2 = g_{P1^{-1}(l2 - l1), P1^{-1} P2}. Applying it to the second
// argument of a divergence collapses any parameter pair to a canonical
// (standard, shifted) setting.
GroupElement canonical_reduce(const GroupElement& g1, const GroupElement& g2);

}  // namespace lsdiv
