#include "hubscan/matrix.hpp"

#include <cmath>
#include <limits>

namespace hubscan {

SymmetricMatrix SymmetricMatrix::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatchError(
        "SymmetricMatrix",
        "expected a square matrix of dimension >= 1, got " +
            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw NonFiniteError("SymmetricMatrix", "matrix contains NaN or Inf");
  }
  // a_ij + a_ji == a_ji + a_ij in IEEE arithmetic, so this is exactly
  // symmetric entrywise.
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  return SymmetricMatrix(Trusted{}, std::move(sym));
}

SymmetricMatrix SymmetricMatrix::identity(int p) {
  if (p < 1) {
    throw InvalidSizeError("SymmetricMatrix", "dimension must be >= 1");
  }
  return SymmetricMatrix(Trusted{}, Eigen::MatrixXd::Identity(p, p));
}

namespace {

// Largest-magnitude entry made non-negative; ties broken by lowest index.
void orient_eigenvector(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index pivot = 0;
  double best = std::abs(v(0));
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best) {
      best = m;
      pivot = i;
    }
  }
  if (v(pivot) < 0.0) {
    v = -v;
  }
}

}  // namespace

EigenDecomposition symmetric_eigen(const SymmetricMatrix& a) {
  if (!a.mat().allFinite()) {
    throw NonFiniteError("symmetric_eigen", "matrix contains NaN or Inf");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("symmetric_eigen",
                           "eigensolver exceeded its iteration budget");
  }
  const int p = a.dim();
  EigenDecomposition out;
  out.eigenvalues.resize(p);
  out.eigenvectors.resize(p, p);
  // Eigen returns ascending order; reverse to descending.
  for (int i = 0; i < p; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(p - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(p - 1 - i);
    orient_eigenvector(out.eigenvectors.col(i));
  }
  return out;
}

LowerTriangular cholesky(const SymmetricMatrix& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("cholesky",
                                   "matrix is not positive definite");
  }
  Eigen::MatrixXd l = llt.matrixL();
  const int p = a.dim();
  // Pivots of an exactly singular matrix land at rounding-noise scale with
  // either sign; a relative floor makes "pivot <= 0" meaningful in floating
  // point.
  const double floor_sq = static_cast<double>(p) *
                          std::numeric_limits<double>::epsilon() *
                          a.mat().diagonal().maxCoeff();
  for (int i = 0; i < p; ++i) {
    if (!(l(i, i) > 0.0) || l(i, i) * l(i, i) <= floor_sq) {
      throw NotPositiveDefiniteError(
          "cholesky", "pivot " + std::to_string(i) + " is not positive");
    }
  }
  return LowerTriangular(std::move(l));
}

SymmetricMatrix invert_spd(const SymmetricMatrix& a) {
  const LowerTriangular l = cholesky(a);
  const int p = a.dim();
  // A^{-1} = L^{-T} L^{-1}
  Eigen::MatrixXd linv = l.mat()
                             .triangularView<Eigen::Lower>()
                             .solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd inv = linv.transpose() * linv;
  try {
    return SymmetricMatrix::from_dense(inv);
  } catch (const NonFiniteError&) {
    throw NotPositiveDefiniteError(
        "invert_spd", "inverse overflowed; matrix is numerically singular");
  }
}

SymmetricMatrix cov_to_corr(const SymmetricMatrix& a) {
  const int p = a.dim();
  for (int i = 0; i < p; ++i) {
    if (!(a(i, i) > 0.0)) {
      throw ZeroVarianceError("cov_to_corr", i);
    }
  }
  Eigen::VectorXd inv_sd = a.mat().diagonal().array().sqrt().inverse();
  Eigen::MatrixXd r = inv_sd.asDiagonal() * a.mat() * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return SymmetricMatrix::from_dense(r);
}

}  // namespace hubscan
