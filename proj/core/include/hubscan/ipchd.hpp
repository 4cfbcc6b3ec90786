#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hubscan/estimators.hpp"
#include "hubscan/matrix.hpp"

namespace hubscan {

/// How the spike count s-hat is chosen.
enum class SMode { kDataDriven, kOverEstimated, kFixed };

enum class RhoMode { kAuto, kFixed };

/// How the hub threshold kappa is resolved: a fixed value in (0,1], the
/// 2*s_hat/p rule, or the two-standard-deviation rule on the influence
/// measures.
enum class KappaMode { kFixed, kTwoSOverP, kTwoSd };

struct IpchdConfig {
  RhoMode rho_mode = RhoMode::kAuto;
  double rho = 0.0;  // used when rho_mode == kFixed

  KappaMode kappa_mode = KappaMode::kTwoSOverP;
  double kappa = 0.5;  // used when kappa_mode == kFixed

  SMode s_mode = SMode::kDataDriven;
  int fixed_s = 1;  // used when s_mode == kFixed

  double ratio_factor = 1.5;
};

/// Full output of one hub detection run, all intermediates included.
struct HubResult {
  int p = 0;
  int s_hat = 0;
  std::string s_mode_used;  // data_driven | data_driven_fallback |
                            // over_estimated | fixed
  bool fallback = false;
  double rho_used = 0.0;
  double kappa_used = 0.0;
  std::vector<double> eigenvalues;  // descending, length p
  std::vector<double> ratios;       // delta_rho(1..floor(p/2))
  std::vector<double> influence;    // omega-hat, length p
  std::vector<int> hubs;            // sorted ascending
  /// When detection ran on a screened submatrix: original index of each
  /// analyzed variable. `hubs` is already mapped back through it.
  std::optional<std::vector<int>> original_indices;
};

struct SEstimate {
  int s_hat = 0;
  bool fallback = false;
};

/// Regularized eigenvalue ratios of a descending spectrum:
/// delta_rho(i) = (gamma_{p-i} + rho) / (gamma_{p-i+1} + rho) for
/// i = 1..floor(p/2). Throws NonPositiveDenominatorError when the smallest
/// used denominator is <= 0 (rho too small for an indefinite estimator).
std::vector<double> eigenvalue_ratios(std::span<const double> eigenvalues_desc,
                                      double rho);

/// Data-driven spike count: the index of the dominant ratio if it exceeds
/// ratio_factor times the runner-up, otherwise the floor(p/5) fallback
/// (floored at 1). Ties resolve to the lowest index.
SEstimate estimate_s_data_driven(std::span<const double> ratios, int p,
                                 double ratio_factor = 1.5);

/// Over-estimated spike count max(1, floor(p/5)).
int estimate_s_over(int p);

/// omega_k = sum of squared k-th coordinates over the s_hat eigenvectors
/// paired with the smallest eigenvalues (the leading eigenvectors of the
/// precision matrix). Satisfies sum_k omega_k == s_hat and omega_k in [0,1].
std::vector<double> influence_measures(const EigenDecomposition& eig,
                                       int s_hat);

/// Indices with influence >= kappa, kappa in (0,1].
std::vector<int> select_hubs(std::span<const double> influence, double kappa);

/// Indices with connectivity strictly above mean + 2 * sample sd.
std::vector<int> select_hubs_2sd(std::span<const double> connectivity);

/// The mean + 2 * sample-sd cutoff used by select_hubs_2sd.
double two_sd_cutoff(std::span<const double> connectivity);

/// Inverse principal components for hub detection: eigendecompose the
/// covariance estimate, resolve rho (auto: max(0, -gamma_min) +
/// 0.05 * median(gamma)), estimate the spike count from the regularized
/// ratios, accumulate the tail-eigenvector influence measures, and threshold
/// them into the hub set.
HubResult detect(const SymmetricMatrix& sigma_hat,
                 const IpchdConfig& cfg = {});

/// Weighted degree alpha_k = ||theta_{.k}||_2^2, the k-th diagonal entry of
/// theta^2.
std::vector<double> weighted_degree(const SymmetricMatrix& theta);

struct RawInverseResult {
  std::vector<int> hubs;      // sorted, original variable indices
  std::vector<double> alpha;  // length p; off-screen variables get 0
};

/// Baseline: invert the sample correlation matrix (screened to screen_t
/// variables first when given; required when p >= n) and apply the 2-sd rule
/// to the weighted degrees of the inverse.
RawInverseResult raw_inverse_baseline(const DataMatrix& x,
                                      std::optional<int> screen_t = {});

}  // namespace hubscan
