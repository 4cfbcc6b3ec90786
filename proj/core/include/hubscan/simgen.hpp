#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hubscan/estimators.hpp"
#include "hubscan/matrix.hpp"

namespace hubscan {

/// Parameters of the planted-hub precision matrix generator.
struct SimConfig {
  int p = 100;   // total dimension
  int t = 100;   // signal-block size, t <= p
  int r = 5;     // number of hubs, r <= t
  double p_hub = 0.8;         // hub connection probability
  double p_nonhub = 0.05;     // non-hub pair connection probability
  double p_nonsignal = 0.005; // non-signal block connection probability
  double delta = 5.0;         // smallest eigenvalue of the generated Theta
  double weight_low = 4.0;    // edge weight magnitude range
  double weight_high = 5.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgumentError on any invariant violation.
  void validate() const;
};

/// A generated model: Theta with planted hubs, its derived covariance /
/// correlation / inverse-correlation matrices, and the measured hub
/// separation diagnostics on Xi.
struct GroundTruthModel {
  SimConfig config;
  SymmetricMatrix theta;
  SymmetricMatrix sigma;     // Theta^{-1}
  SymmetricMatrix corr;      // correlation of sigma
  SymmetricMatrix inv_corr;  // Xi = corr^{-1}
  std::vector<int> hub_set;  // sorted ascending
  double empirical_tau = 0.0;  // min_{h in H} alpha_h / max_{k not in H} alpha_k
  double empirical_c = 0.0;    // max_{h in H} alpha_h / min_{h in H} alpha_h
};

/// Build Theta from the block construction: draw the hub set, connect pairs
/// inside the signal block with p_hub / p_nonhub, the non-signal blocks with
/// p_nonsignal, weight every edge by sign * Uniform[weight_low, weight_high],
/// then shift all diagonals to delta - lambda_min so the spectrum floor is
/// exactly delta. Deterministic per seed; hub selection, adjacency and
/// weights consume independent sub-streams of the seed.
GroundTruthModel generate_precision(const SimConfig& cfg);

/// Draw n rows of N(0, Theta^{-1}) by solving L^T x = z against the Cholesky
/// factor of Theta (of Xi when use_correlation is set, giving N(0, corr)).
/// Deterministic per seed.
DataMatrix sample_gaussian(const GroundTruthModel& model, long n,
                           std::uint64_t seed, bool use_correlation = false);

/// JSON document {config, theta (dense row-major), hub_set, empirical_tau,
/// empirical_c}; derived matrices are recomputed on load.
std::string model_to_json(const GroundTruthModel& model);
GroundTruthModel model_from_json(const std::string& text);

}  // namespace hubscan
