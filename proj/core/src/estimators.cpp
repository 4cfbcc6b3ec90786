#include "hubscan/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hubscan {

DataMatrix::DataMatrix(Eigen::MatrixXd values,
                       std::vector<std::string> variable_names)
    : values_(std::move(values)), names_(std::move(variable_names)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InvalidSizeError("DataMatrix", "need at least one row and column");
  }
  if (!values_.allFinite()) {
    throw NonFiniteError("DataMatrix", "data contains NaN or Inf");
  }
  if (!names_.empty() && static_cast<long>(names_.size()) != values_.cols()) {
    throw DimensionMismatchError(
        "DataMatrix", "got " + std::to_string(names_.size()) +
                          " variable names for " +
                          std::to_string(values_.cols()) + " columns");
  }
}

Mask Mask::from_indicator(const Eigen::MatrixXd& indicator) {
  const int p = static_cast<int>(indicator.rows());
  if (indicator.cols() != p || p < 1) {
    throw DimensionMismatchError("Mask", "indicator must be square");
  }
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const double v = indicator(i, j);
      if (v != 0.0 && v != 1.0) {
        throw InvalidArgumentError("Mask", "entries must be exactly 0 or 1");
      }
      if (indicator(i, j) != indicator(j, i)) {
        throw InvalidArgumentError("Mask", "indicator must be symmetric");
      }
    }
    if (indicator(i, i) != 1.0) {
      throw InvalidArgumentError("Mask", "diagonal must be identically 1");
    }
  }
  return Mask(indicator);
}

Mask Mask::all_ones(int p) {
  if (p < 1) throw InvalidSizeError("Mask", "dimension must be >= 1");
  return Mask(Eigen::MatrixXd::Ones(p, p));
}

Mask Mask::diagonal_only(int p) {
  if (p < 1) throw InvalidSizeError("Mask", "dimension must be >= 1");
  return Mask(Eigen::MatrixXd::Identity(p, p));
}

SymmetricMatrix sample_covariance(const DataMatrix& x) {
  const long n = x.n();
  if (n < 2) {
    throw InsufficientSamplesError(
        "sample_covariance",
        "need n >= 2 observations, got " + std::to_string(n));
  }
  Eigen::MatrixXd centered =
      x.values().rowwise() - x.values().colwise().mean();
  Eigen::MatrixXd s =
      (centered.transpose() * centered) / static_cast<double>(n - 1);
  return SymmetricMatrix::from_dense(s);
}

SymmetricMatrix sample_correlation(const DataMatrix& x) {
  return cov_to_corr(sample_covariance(x));
}

ScreenSelection screen_variables(const SymmetricMatrix& s, int t) {
  const int p = s.dim();
  if (p < 2) {
    throw InvalidSizeError("screen_variables", "need p >= 2 variables");
  }
  if (t < 1 || t > p) {
    throw InvalidSizeError("screen_variables",
                           "screen size must satisfy 1 <= t <= p, got " +
                               std::to_string(t));
  }
  std::vector<double> scores(p, 0.0);
  for (int i = 0; i < p; ++i) {
    double best = 0.0;
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      best = std::max(best, std::abs(s(i, j)));
    }
    scores[i] = best;
  }
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[a] > scores[b];  // stable keeps lowest index on ties
  });
  std::vector<int> selected(order.begin(), order.begin() + t);
  std::sort(selected.begin(), selected.end());

  Eigen::MatrixXd sub(t, t);
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      sub(a, b) = s(selected[a], selected[b]);
    }
  }
  return ScreenSelection{std::move(selected), std::move(scores),
                         SymmetricMatrix::from_dense(sub)};
}

Mask threshold_mask(const SymmetricMatrix& s, double xi, long n,
                    bool signed_rule) {
  const int p = s.dim();
  if (p < 2) {
    throw InvalidSizeError("threshold_mask", "need p >= 2 variables");
  }
  if (n < 1) {
    throw InvalidSizeError("threshold_mask", "need n >= 1");
  }
  if (!(xi >= 0.0)) {
    throw InvalidArgumentError("threshold_mask", "xi must be >= 0");
  }
  const double threshold = xi * std::sqrt(std::log(static_cast<double>(p)) /
                                          static_cast<double>(n));
  Eigen::MatrixXd ind = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    ind(i, i) = 1.0;
    for (int j = i + 1; j < p; ++j) {
      const double v = signed_rule ? s(i, j) : std::abs(s(i, j));
      if (v >= threshold) {
        ind(i, j) = ind(j, i) = 1.0;
      }
    }
  }
  return Mask::from_indicator(ind);
}

SymmetricMatrix apply_mask(const Mask& m, const SymmetricMatrix& s) {
  if (m.dim() != s.dim()) {
    throw DimensionMismatchError(
        "apply_mask", "mask dimension " + std::to_string(m.dim()) +
                          " != matrix dimension " + std::to_string(s.dim()));
  }
  return SymmetricMatrix::from_dense(
      m.indicator().cwiseProduct(s.mat()));
}

double mask_complexity(const Mask& m) {
  return m.indicator().array().square().colwise().sum().maxCoeff();
}

}  // namespace hubscan
