#include "hubscan/pipeline.hpp"

#include <algorithm>

namespace hubscan {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kSample: return "sample";
    case EstimatorKind::kScreened: return "screened";
    case EstimatorKind::kThresholded: return "thresholded";
    case EstimatorKind::kMasked: return "masked";
  }
  return "unknown";
}

SymmetricMatrix build_estimate(const DataMatrix& x, const EstimatorSpec& est,
                               std::optional<ScreenSelection>* screen) {
  const SymmetricMatrix base = est.use_correlation ? sample_correlation(x)
                                                   : sample_covariance(x);
  switch (est.kind) {
    case EstimatorKind::kSample:
      return base;
    case EstimatorKind::kScreened: {
      if (est.screen_size > x.n()) {
        throw InvalidSizeError("build_estimate",
                               "screen size must satisfy T <= n");
      }
      ScreenSelection sel = screen_variables(base, est.screen_size);
      SymmetricMatrix sub = sel.submatrix;
      if (screen) *screen = std::move(sel);
      return sub;
    }
    case EstimatorKind::kThresholded: {
      const Mask m = threshold_mask(base, est.xi, x.n(), est.signed_threshold);
      return apply_mask(m, base);
    }
    case EstimatorKind::kMasked: {
      if (!est.mask.has_value()) {
        throw InvalidArgumentError("build_estimate",
                                   "masked estimator requires a mask");
      }
      return apply_mask(*est.mask, base);
    }
  }
  throw InvalidArgumentError("build_estimate", "unknown estimator kind");
}

PipelineResult detect_pipeline(const DataMatrix& x, const EstimatorSpec& est,
                               const IpchdConfig& cfg) {
  PipelineResult out;
  const SymmetricMatrix estimate = build_estimate(x, est, &out.screen);
  out.result = detect(estimate, cfg);
  // Hubs stay in the detected (post-screening) index space so that
  // hubs == {k : influence_k >= kappa} holds; original_indices carries the
  // map back to the input columns.
  if (out.screen.has_value()) {
    out.result.original_indices = out.screen->selected;
  }
  return out;
}

}  // namespace hubscan
