#pragma once

#include <optional>

#include "hubscan/estimators.hpp"
#include "hubscan/ipchd.hpp"

namespace hubscan {

enum class EstimatorKind { kSample, kScreened, kThresholded, kMasked };

std::string to_string(EstimatorKind kind);

/// Which covariance/correlation estimator feeds detect().
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kSample;
  bool use_correlation = false;  // correlation instead of covariance
  int screen_size = 0;           // kScreened
  double xi = 1.0;               // kThresholded
  bool signed_threshold = false; // kThresholded
  std::optional<Mask> mask;      // kMasked
};

struct PipelineResult {
  HubResult result;
  std::optional<ScreenSelection> screen;
};

/// Build the configured estimate from data. For kScreened the selection is
/// reported through `screen` and the estimate is the screened submatrix.
SymmetricMatrix build_estimate(const DataMatrix& x, const EstimatorSpec& est,
                               std::optional<ScreenSelection>* screen);

/// data -> estimator -> detect. For screened estimators the result indexes
/// the screened space and `result.original_indices` maps positions back to
/// the input columns.
PipelineResult detect_pipeline(const DataMatrix& x, const EstimatorSpec& est,
                               const IpchdConfig& cfg);

}  // namespace hubscan
