#include "lsdiv/linalg.hpp"

#include <cmath>

namespace lsdiv {

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void check_spd(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::domain_error("SPD check: matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw std::domain_error("SPD check: entries must be finite");
  }
  if (!is_symmetric(m)) {
    throw std::domain_error("SPD check: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double largest = ev.maxCoeff();
  if (largest <= 0.0 || ev.minCoeff() <= 1e-12 * largest) {
    throw std::domain_error("SPD check: matrix is not positive-definite");
  }
}

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
  check_spd(m_);
  m_ = 0.5 * (m_ + m_.transpose().eval());  // scrub roundoff asymmetry
}

SpdMatrix SpdMatrix::identity(Eigen::Index d) {
  return SpdMatrix(Matrix::Identity(d, d));
}

SpdMatrix spd_sqrt(const SpdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.m());
  Vector roots = es.eigenvalues().cwiseSqrt();
  Matrix r = es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
  return SpdMatrix(std::move(r));
}

double spd_det(const SpdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.m(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().prod();
}

SpdMatrix spd_inv(const SpdMatrix& m) {
  Eigen::LLT<Matrix> llt(m.m());
  Matrix inv = llt.solve(Matrix::Identity(m.dim(), m.dim()));
  return SpdMatrix(0.5 * (inv + inv.transpose().eval()));
}

double trace(const Matrix& m) { return m.trace(); }

double det(const Matrix& m) { return m.determinant(); }

Matrix inverse(const Matrix& m) {
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw std::domain_error("inverse: matrix is singular within tolerance");
  }
  return lu.inverse();
}

double log_abs_det(const Matrix& m) {
  Eigen::PartialPivLU<Matrix> lu(m);
  double acc = 0.0;
  const auto& u = lu.matrixLU();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    acc += std::log(std::abs(u(i, i)));
  }
  return acc;
}

}  // namespace lsdiv
