#pragma once

#include "lsdiv/common.hpp"

namespace lsdiv {

// Relative symmetry test: max |M - M^T| <= rel_tol * max |M| (absolute for
// matrices with vanishing magnitude).
bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

// Throws std::domain_error unless m is symmetric (1e-12 relative) with
// smallest eigenvalue > 1e-12 * largest.
void check_spd(const Matrix& m);

// Symmetric positive-definite matrix, validated on construction.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix m);
  static SpdMatrix identity(Eigen::Index d);

  const Matrix& m() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

// Unique symmetric positive-definite square root, via the symmetric
// eigendecomposition.
SpdMatrix spd_sqrt(const SpdMatrix& m);
double spd_det(const SpdMatrix& m);
SpdMatrix spd_inv(const SpdMatrix& m);
double trace(const Matrix& m);

// General small-matrix helpers. Products of SPD factors arising in group
// compositions need not be symmetric, so these do not assume SPD input.
double det(const Matrix& m);
Matrix inverse(const Matrix& m);  // throws std::domain_error when singular
double log_abs_det(const Matrix& m);

}  // namespace lsdiv
