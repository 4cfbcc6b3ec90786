#pragma once

#include <Eigen/Dense>

#include "hubscan/errors.hpp"

namespace hubscan {

/// Dense p x p real symmetric matrix. Construction symmetrizes the input
/// (average of A and A^T) and rejects non-finite entries, so every instance
/// satisfies entries(i,j) == entries(j,i) exactly and dim >= 1.
class SymmetricMatrix {
 public:
  /// 1x1 zero matrix.
  SymmetricMatrix() : m_(Eigen::MatrixXd::Zero(1, 1)) {}

  static SymmetricMatrix from_dense(const Eigen::MatrixXd& m);
  static SymmetricMatrix identity(int p);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& mat() const { return m_; }

 private:
  struct Trusted {};
  SymmetricMatrix(Trusted, Eigen::MatrixXd m) : m_(std::move(m)) {}

  Eigen::MatrixXd m_;
};

/// Eigenvalues sorted descending; column i of `eigenvectors` pairs with
/// eigenvalues[i]. The basis is orthonormal and each vector is oriented so
/// that its largest-magnitude entry (lowest index on ties) is non-negative.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Lower-triangular Cholesky factor with strictly positive diagonal.
class LowerTriangular {
 public:
  explicit LowerTriangular(Eigen::MatrixXd l) : m_(std::move(l)) {}

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Full eigendecomposition of a symmetric (possibly indefinite) matrix.
/// Deterministic for a fixed input.
EigenDecomposition symmetric_eigen(const SymmetricMatrix& a);

/// L with L L^T == a. Throws NotPositiveDefiniteError when a is not SPD.
LowerTriangular cholesky(const SymmetricMatrix& a);

/// Inverse of an SPD matrix via its Cholesky factorization.
SymmetricMatrix invert_spd(const SymmetricMatrix& a);

/// r(i,j) = a(i,j) / sqrt(a(i,i) a(j,j)), unit diagonal. Throws
/// ZeroVarianceError naming the first index with a(i,i) <= 0.
SymmetricMatrix cov_to_corr(const SymmetricMatrix& a);

}  // namespace hubscan
