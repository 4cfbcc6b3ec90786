#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hubscan/matrix.hpp"

namespace hubscan {

/// n observations (rows) of p variables (columns), all values finite.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd values,
                      std::vector<std::string> variable_names = {});

  long n() const { return values_.rows(); }
  int p() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& variable_names() const { return names_; }

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
};

/// Symmetric {0,1} indicator matrix with unit diagonal.
class Mask {
 public:
  static Mask from_indicator(const Eigen::MatrixXd& indicator);
  static Mask all_ones(int p);
  static Mask diagonal_only(int p);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& indicator() const { return m_; }

 private:
  explicit Mask(Eigen::MatrixXd m) : m_(std::move(m)) {}

  Eigen::MatrixXd m_;
};

/// Result of covariance screening: the T kept variable indices (ascending),
/// the per-variable scores max_{j != i} |s_ij|, and the principal submatrix
/// on the kept set.
struct ScreenSelection {
  std::vector<int> selected;
  std::vector<double> scores;
  SymmetricMatrix submatrix;
};

/// Column-centered covariance with the n-1 denominator.
SymmetricMatrix sample_covariance(const DataMatrix& x);

/// cov_to_corr(sample_covariance(x)); ZeroVarianceError names the offending
/// variable.
SymmetricMatrix sample_correlation(const DataMatrix& x);

/// Keep the t variables with the largest max_{j != i} |s_ij|, ties broken by
/// lowest index.
ScreenSelection screen_variables(const SymmetricMatrix& s, int t);

/// Indicator of |s_ij| >= xi * sqrt(log(p) / n) off the diagonal (diagonal
/// always kept). `signed_rule` drops the absolute value, reproducing the
/// literal thresholding rule that ignores negative entries.
Mask threshold_mask(const SymmetricMatrix& s, double xi, long n,
                    bool signed_rule = false);

/// Entrywise product m .* s.
SymmetricMatrix apply_mask(const Mask& m, const SymmetricMatrix& s);

/// Squared matrix 1-2 norm: max_j sum_i m_ij^2.
double mask_complexity(const Mask& m);

}  // namespace hubscan
