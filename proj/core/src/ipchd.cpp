#include "hubscan/ipchd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hubscan {

namespace {

int fallback_s(int p) {
  const int cap = std::max(1, p / 2);
  return std::clamp(p / 5, 1, cap);
}

double median_of(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double auto_rho(const Eigen::VectorXd& eigenvalues_desc) {
  const double gamma_min = eigenvalues_desc(eigenvalues_desc.size() - 1);
  const std::span<const double> all(eigenvalues_desc.data(),
                                    static_cast<std::size_t>(
                                        eigenvalues_desc.size()));
  return std::max(0.0, -gamma_min) + 0.05 * median_of(all);
}

}  // namespace

std::vector<double> eigenvalue_ratios(std::span<const double> eigenvalues_desc,
                                      double rho) {
  const int p = static_cast<int>(eigenvalues_desc.size());
  if (p < 2) {
    throw InvalidSizeError("eigenvalue_ratios", "need p >= 2 eigenvalues");
  }
  if (!(rho >= 0.0)) {
    throw InvalidArgumentError("eigenvalue_ratios", "rho must be >= 0");
  }
  const int m = p / 2;
  std::vector<double> ratios(m);
  for (int i = 1; i <= m; ++i) {
    // 1-based: delta(i) = (gamma_{p-i} + rho) / (gamma_{p-i+1} + rho)
    const double denom = eigenvalues_desc[p - i] + rho;
    if (!(denom > 0.0)) {
      throw NonPositiveDenominatorError(
          "eigenvalue_ratios",
          "gamma_{p-" + std::to_string(i) + "+1} + rho <= 0; "
          "rho too small for an indefinite estimator");
    }
    ratios[i - 1] = (eigenvalues_desc[p - i - 1] + rho) / denom;
  }
  return ratios;
}

SEstimate estimate_s_data_driven(std::span<const double> ratios, int p,
                                 double ratio_factor) {
  const int m = static_cast<int>(ratios.size());
  if (p < 2 || m != p / 2) {
    throw InvalidSizeError(
        "estimate_s_data_driven",
        "ratios must have length floor(p/2) = " + std::to_string(p / 2) +
            ", got " + std::to_string(m));
  }
  if (!(ratio_factor > 1.0)) {
    throw InvalidArgumentError("estimate_s_data_driven",
                               "ratio_factor must be > 1");
  }
  if (m < 2) {
    // A lone ratio has nothing to be compared against.
    return SEstimate{fallback_s(p), true};
  }
  int i1 = 0;
  for (int i = 1; i < m; ++i) {
    if (ratios[i] > ratios[i1]) i1 = i;
  }
  int i2 = i1 == 0 ? 1 : 0;
  for (int i = 0; i < m; ++i) {
    if (i != i1 && ratios[i] > ratios[i2]) i2 = i;
  }
  if (ratios[i1] > ratio_factor * ratios[i2]) {
    return SEstimate{i1 + 1, false};
  }
  return SEstimate{fallback_s(p), true};
}

int estimate_s_over(int p) {
  if (p < 1) {
    throw InvalidSizeError("estimate_s_over", "need p >= 1");
  }
  return std::max(1, p / 5);
}

std::vector<double> influence_measures(const EigenDecomposition& eig,
                                       int s_hat) {
  const int p = static_cast<int>(eig.eigenvalues.size());
  if (s_hat < 1 || s_hat > p) {
    throw InvalidSError("influence_measures",
                        "s_hat must satisfy 1 <= s_hat <= p, got " +
                            std::to_string(s_hat));
  }
  // Tail columns pair with the s_hat smallest eigenvalues.
  std::vector<double> omega(p, 0.0);
  for (int c = p - s_hat; c < p; ++c) {
    for (int k = 0; k < p; ++k) {
      const double v = eig.eigenvectors(k, c);
      omega[k] += v * v;
    }
  }
  return omega;
}

std::vector<int> select_hubs(std::span<const double> influence, double kappa) {
  if (!(kappa > 0.0) || kappa > 1.0) {
    throw InvalidArgumentError("select_hubs", "kappa must be in (0, 1]");
  }
  std::vector<int> hubs;
  for (int k = 0; k < static_cast<int>(influence.size()); ++k) {
    if (influence[k] >= kappa) hubs.push_back(k);
  }
  return hubs;
}

double two_sd_cutoff(std::span<const double> connectivity) {
  const int p = static_cast<int>(connectivity.size());
  if (p < 2) {
    throw InvalidSizeError("select_hubs_2sd", "need p >= 2 values");
  }
  const double mean =
      std::accumulate(connectivity.begin(), connectivity.end(), 0.0) / p;
  double ss = 0.0;
  for (double c : connectivity) {
    ss += (c - mean) * (c - mean);
  }
  const double sd = std::sqrt(ss / (p - 1));
  return mean + 2.0 * sd;
}

std::vector<int> select_hubs_2sd(std::span<const double> connectivity) {
  const double cutoff = two_sd_cutoff(connectivity);
  std::vector<int> hubs;
  for (int k = 0; k < static_cast<int>(connectivity.size()); ++k) {
    if (connectivity[k] > cutoff) hubs.push_back(k);
  }
  return hubs;
}

HubResult detect(const SymmetricMatrix& sigma_hat, const IpchdConfig& cfg) {
  const int p = sigma_hat.dim();
  if (p < 2) {
    throw InvalidSizeError("detect", "need p >= 2 variables");
  }
  if (cfg.kappa_mode == KappaMode::kFixed &&
      (!(cfg.kappa > 0.0) || cfg.kappa > 1.0)) {
    throw InvalidArgumentError("detect", "kappa must be in (0, 1]");
  }
  if (cfg.rho_mode == RhoMode::kFixed && !(cfg.rho >= 0.0)) {
    throw InvalidArgumentError("detect", "rho must be >= 0");
  }
  if (cfg.s_mode == SMode::kFixed &&
      (cfg.fixed_s < 1 || cfg.fixed_s > p / 2)) {
    throw InvalidArgumentError(
        "detect", "fixed s must satisfy 1 <= s <= floor(p/2)");
  }

  const EigenDecomposition eig = symmetric_eigen(sigma_hat);

  HubResult out;
  out.p = p;
  out.rho_used =
      cfg.rho_mode == RhoMode::kAuto ? auto_rho(eig.eigenvalues) : cfg.rho;
  out.eigenvalues.assign(eig.eigenvalues.data(), eig.eigenvalues.data() + p);
  out.ratios = eigenvalue_ratios(out.eigenvalues, out.rho_used);

  switch (cfg.s_mode) {
    case SMode::kDataDriven: {
      const SEstimate est =
          estimate_s_data_driven(out.ratios, p, cfg.ratio_factor);
      out.s_hat = est.s_hat;
      out.fallback = est.fallback;
      out.s_mode_used = est.fallback ? "data_driven_fallback" : "data_driven";
      break;
    }
    case SMode::kOverEstimated:
      out.s_hat = estimate_s_over(p);
      out.s_mode_used = "over_estimated";
      break;
    case SMode::kFixed:
      out.s_hat = cfg.fixed_s;
      out.s_mode_used = "fixed";
      break;
  }

  out.influence = influence_measures(eig, out.s_hat);

  switch (cfg.kappa_mode) {
    case KappaMode::kFixed:
      out.kappa_used = cfg.kappa;
      out.hubs = select_hubs(out.influence, out.kappa_used);
      break;
    case KappaMode::kTwoSOverP:
      out.kappa_used = 2.0 * out.s_hat / p;
      out.hubs = select_hubs(out.influence, out.kappa_used);
      break;
    case KappaMode::kTwoSd:
      out.kappa_used = two_sd_cutoff(out.influence);
      out.hubs = select_hubs_2sd(out.influence);
      break;
  }
  return out;
}

std::vector<double> weighted_degree(const SymmetricMatrix& theta) {
  const Eigen::VectorXd alpha = theta.mat().colwise().squaredNorm();
  return std::vector<double>(alpha.data(), alpha.data() + alpha.size());
}

RawInverseResult raw_inverse_baseline(const DataMatrix& x,
                                      std::optional<int> screen_t) {
  const long n = x.n();
  const int p = x.p();
  if (!screen_t.has_value() && p >= n) {
    throw MissingScreenSizeError(
        "raw_inverse_baseline",
        "p >= n requires a screening size for invertibility");
  }
  const SymmetricMatrix r = sample_correlation(x);

  RawInverseResult out;
  out.alpha.assign(p, 0.0);
  if (screen_t.has_value()) {
    const ScreenSelection sel = screen_variables(r, *screen_t);
    const SymmetricMatrix xi = invert_spd(sel.submatrix);
    const std::vector<double> alpha_local = weighted_degree(xi);
    for (std::size_t a = 0; a < sel.selected.size(); ++a) {
      out.alpha[sel.selected[a]] = alpha_local[a];
    }
    for (int local : select_hubs_2sd(alpha_local)) {
      out.hubs.push_back(sel.selected[local]);
    }
    std::sort(out.hubs.begin(), out.hubs.end());
  } else {
    const SymmetricMatrix xi = invert_spd(r);
    out.alpha = weighted_degree(xi);
    out.hubs = select_hubs_2sd(out.alpha);
  }
  return out;
}

}  // namespace hubscan
