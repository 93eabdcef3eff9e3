#include "lsdiv/group.hpp"

#include <cmath>

namespace lsdiv {

namespace {

void check_dims(const GroupElement& a, const GroupElement& b) {
  if (a.dim() != b.dim()) {
    throw std::domain_error("group: dimension mismatch");
  }
}

}  // namespace

GroupElement::GroupElement(Vector l, Matrix p, int) : loc_(std::move(l)), scale_(std::move(p)) {}

GroupElement::GroupElement(double l, double s) : loc_(1), scale_(1, 1) {
  if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(l)) {
    throw std::domain_error("GroupElement: scalar scale must be finite and positive");
  }
  loc_(0) = l;
  scale_(0, 0) = s;
}

GroupElement::GroupElement(Vector l, const SpdMatrix& p) : loc_(std::move(l)), scale_(p.m()) {
  if (loc_.size() != p.dim()) {
    throw std::domain_error("GroupElement: location/scale dimension mismatch");
  }
  if (!loc_.allFinite()) {
    throw std::domain_error("GroupElement: location must be finite");
  }
}

GroupElement GroupElement::identity(Eigen::Index d) {
  return GroupElement(Vector::Zero(d), Matrix::Identity(d, d), 0);
}

GroupElement GroupElement::with_general_scale(Vector l, Matrix p) {
  if (l.size() != p.rows() || p.rows() != p.cols()) {
    throw std::domain_error("GroupElement: location/scale dimension mismatch");
  }
  if (!l.allFinite() || !p.allFinite()) {
    throw std::domain_error("GroupElement: entries must be finite");
  }
  Eigen::FullPivLU<Matrix> lu(p);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw std::domain_error("GroupElement: scale must be invertible");
  }
  return GroupElement(std::move(l), std::move(p), 0);
}

double GroupElement::loc1() const {
  if (dim() != 1) throw std::domain_error("GroupElement: loc1 requires d=1");
  return loc_(0);
}

double GroupElement::scale1() const {
  if (dim() != 1) throw std::domain_error("GroupElement: scale1 requires d=1");
  return scale_(0, 0);
}

bool GroupElement::scale_is_spd(double rel_tol) const {
  if (!is_symmetric(scale_, rel_tol)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (scale_ + scale_.transpose()),
                                           Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  return ev.minCoeff() > 1e-12 * std::max(ev.maxCoeff(), 0.0);
}

bool GroupElement::is_identity(double tol) const {
  return loc_.cwiseAbs().maxCoeff() <= tol &&
         (scale_ - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol;
}

GroupElement compose(const GroupElement& g2, const GroupElement& g1) {
  check_dims(g2, g1);
  return GroupElement::with_general_scale(g2.loc() + g2.scale() * g1.loc(),
                                          g2.scale() * g1.scale());
}

GroupElement inverse(const GroupElement& g) {
  Matrix p_inv = inverse(g.scale());
  Vector loc = -(p_inv * g.loc());
  return GroupElement::with_general_scale(std::move(loc), std::move(p_inv));
}

Matrix as_matrix(const GroupElement& g) {
  const Eigen::Index d = g.dim();
  Matrix m = Matrix::Zero(d + 1, d + 1);
  m.topLeftCorner(d, d) = g.scale();
  m.topRightCorner(d, 1) = g.loc();
  m(d, d) = 1.0;
  return m;
}

GroupElement from_matrix(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n < 2 || m.cols() != n) {
    throw std::domain_error("from_matrix: expected a square matrix of size d+1 >= 2");
  }
  const Eigen::Index d = n - 1;
  if (m.bottomLeftCorner(1, d).cwiseAbs().maxCoeff() != 0.0 || m(d, d) != 1.0) {
    throw std::domain_error("from_matrix: bottom row must be (0,...,0,1)");
  }
  return GroupElement::with_general_scale(m.topRightCorner(d, 1), m.topLeftCorner(d, d));
}

Vector act_on_point(const GroupElement& g, const Vector& x) {
  if (x.size() != g.dim()) throw std::domain_error("act_on_point: dimension mismatch");
  return g.scale() * x + g.loc();
}

Vector pull_back(const GroupElement& g, const Vector& y) {
  if (y.size() != g.dim()) throw std::domain_error("pull_back: dimension mismatch");
  return inverse(g.scale()) * (y - g.loc());
}

double act_on_point(const GroupElement& g, double x) {
  return g.scale1() * x + g.loc1();
}

double pull_back(const GroupElement& g, double y) {
  return (y - g.loc1()) / g.scale1();
}

GroupElement canonical_reduce(const GroupElement& g1, const GroupElement& g2) {
  check_dims(g1, g2);
  return compose(inverse(g1), g2);
}

}  // namespace lsdiv
