#include "hubscan/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "hubscan/ipchd.hpp"
#include "hubscan/rng.hpp"

namespace hubscan {

namespace {

constexpr std::uint64_t kHubStream = 1;
constexpr std::uint64_t kAdjacencyStream = 2;
constexpr std::uint64_t kWeightStream = 3;
constexpr std::uint64_t kSampleStream = 4;

}  // namespace

void SimConfig::validate() const {
  if (p < 1 || t < 1 || r < 1 || r > t || t > p) {
    throw InvalidArgumentError("SimConfig",
                               "need 1 <= r <= t <= p, got r=" +
                                   std::to_string(r) + " t=" +
                                   std::to_string(t) + " p=" +
                                   std::to_string(p));
  }
  if (!(p_nonsignal >= 0.0) || !(p_nonsignal <= p_nonhub) ||
      !(p_nonhub < p_hub) || !(p_hub <= 1.0)) {
    throw InvalidArgumentError(
        "SimConfig", "need 0 <= p_nonsignal <= p_nonhub < p_hub <= 1");
  }
  if (!(delta > 0.0)) {
    throw InvalidArgumentError("SimConfig", "delta must be > 0");
  }
  if (!(weight_low > 0.0) || !(weight_low < weight_high)) {
    throw InvalidArgumentError("SimConfig",
                               "need 0 < weight_low < weight_high");
  }
}

GroundTruthModel generate_precision(const SimConfig& cfg) {
  cfg.validate();
  const int p = cfg.p;
  const int t = cfg.t;

  std::mt19937_64 hub_rng(mix_seed(cfg.seed, kHubStream));
  std::mt19937_64 adj_rng(mix_seed(cfg.seed, kAdjacencyStream));
  std::mt19937_64 wgt_rng(mix_seed(cfg.seed, kWeightStream));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Hub set: partial Fisher-Yates gives a uniform size-r subset of {0..t-1}.
  std::vector<int> pool(t);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < cfg.r; ++i) {
    const int j =
        i + static_cast<int>(unit(hub_rng) * static_cast<double>(t - i));
    std::swap(pool[i], pool[std::min(j, t - 1)]);
  }
  std::vector<int> hubs(pool.begin(), pool.begin() + cfg.r);
  std::sort(hubs.begin(), hubs.end());
  std::vector<bool> is_hub(t, false);
  for (int h : hubs) is_hub[h] = true;

  const auto draw_weight = [&]() {
    const double sign = unit(wgt_rng) < 0.5 ? -1.0 : 1.0;
    return sign * (cfg.weight_low +
                   unit(wgt_rng) * (cfg.weight_high - cfg.weight_low));
  };

  Eigen::MatrixXd tilde;
  bool any_edge = false;
  for (int attempt = 0; attempt < 100 && !any_edge; ++attempt) {
    tilde = Eigen::MatrixXd::Zero(p, p);
    // Signal block: pairs inside {0..t-1}.
    for (int i = 0; i < t; ++i) {
      for (int j = i + 1; j < t; ++j) {
        const double prob =
            (is_hub[i] || is_hub[j]) ? cfg.p_hub : cfg.p_nonhub;
        const bool edge = unit(adj_rng) < prob;
        const double w = draw_weight();
        if (edge) {
          tilde(i, j) = tilde(j, i) = w;
          any_edge = true;
        }
      }
    }
    // E block: non-signal rows against signal columns.
    for (int i = t; i < p; ++i) {
      for (int j = 0; j < t; ++j) {
        const bool edge = unit(adj_rng) < cfg.p_nonsignal;
        const double w = draw_weight();
        if (edge) {
          tilde(i, j) = tilde(j, i) = w;
          any_edge = true;
        }
      }
    }
    // F block: pairs inside the non-signal set, diagonal left zero.
    for (int i = t; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const bool edge = unit(adj_rng) < cfg.p_nonsignal;
        const double w = draw_weight();
        if (edge) {
          tilde(i, j) = tilde(j, i) = w;
          any_edge = true;
        }
      }
    }
  }
  if (!any_edge) {
    throw DegenerateGraphError(
        "generate_precision",
        "adjacency stayed empty after 100 attempts; connection "
        "probabilities too small for this dimension");
  }

  const SymmetricMatrix tilde_sym = SymmetricMatrix::from_dense(tilde);
  const EigenDecomposition ed = symmetric_eigen(tilde_sym);
  const double lambda_min = ed.eigenvalues(p - 1);

  // Shifting every diagonal by delta - lambda_min floors the spectrum at
  // delta exactly.
  Eigen::MatrixXd theta = tilde;
  theta.diagonal().setConstant(cfg.delta - lambda_min);

  GroundTruthModel model;
  model.config = cfg;
  model.theta = SymmetricMatrix::from_dense(theta);
  model.sigma = invert_spd(model.theta);
  model.corr = cov_to_corr(model.sigma);
  model.inv_corr = invert_spd(model.corr);
  model.hub_set = hubs;

  const std::vector<double> alpha = weighted_degree(model.inv_corr);
  double hub_min = std::numeric_limits<double>::infinity();
  double hub_max = 0.0;
  double nonhub_max = 0.0;
  std::vector<bool> in_hub_set(p, false);
  for (int h : hubs) in_hub_set[h] = true;
  for (int k = 0; k < p; ++k) {
    if (in_hub_set[k]) {
      hub_min = std::min(hub_min, alpha[k]);
      hub_max = std::max(hub_max, alpha[k]);
    } else {
      nonhub_max = std::max(nonhub_max, alpha[k]);
    }
  }
  model.empirical_tau = cfg.r == p
                            ? std::numeric_limits<double>::infinity()
                            : hub_min / nonhub_max;
  model.empirical_c = hub_max / hub_min;
  return model;
}

DataMatrix sample_gaussian(const GroundTruthModel& model, long n,
                           std::uint64_t seed, bool use_correlation) {
  if (n < 1) {
    throw InvalidSizeError("sample_gaussian", "need n >= 1");
  }
  const SymmetricMatrix& precision =
      use_correlation ? model.inv_corr : model.theta;
  const LowerTriangular l = cholesky(precision);
  const int p = precision.dim();

  std::mt19937_64 rng(mix_seed(seed, kSampleStream));
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd z(p);
  const auto upper = l.mat().transpose().triangularView<Eigen::Upper>();
  for (long row = 0; row < n; ++row) {
    for (int j = 0; j < p; ++j) z(j) = gauss(rng);
    // L^T x = z  =>  x ~ N(0, (L L^T)^{-1})
    x.row(row) = upper.solve(z).transpose();
  }
  return DataMatrix(std::move(x));
}

std::string model_to_json(const GroundTruthModel& model) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json config;
  const SimConfig& c = model.config;
  config["p"] = c.p;
  config["t"] = c.t;
  config["r"] = c.r;
  config["p_hub"] = c.p_hub;
  config["p_nonhub"] = c.p_nonhub;
  config["p_nonsignal"] = c.p_nonsignal;
  config["delta"] = c.delta;
  config["weight_low"] = c.weight_low;
  config["weight_high"] = c.weight_high;
  config["seed"] = c.seed;
  doc["config"] = std::move(config);

  const int p = model.theta.dim();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(p) * p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) flat.push_back(model.theta(i, j));
  }
  doc["theta"] = std::move(flat);
  doc["hub_set"] = model.hub_set;
  doc["empirical_tau"] = model.empirical_tau;  // serialized as null when inf
  doc["empirical_c"] = model.empirical_c;
  return doc.dump();
}

GroundTruthModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError("model_from_json", e.what());
  }
  GroundTruthModel model;
  try {
    const auto& c = doc.at("config");
    model.config.p = c.at("p").get<int>();
    model.config.t = c.at("t").get<int>();
    model.config.r = c.at("r").get<int>();
    model.config.p_hub = c.at("p_hub").get<double>();
    model.config.p_nonhub = c.at("p_nonhub").get<double>();
    model.config.p_nonsignal = c.at("p_nonsignal").get<double>();
    model.config.delta = c.at("delta").get<double>();
    model.config.weight_low = c.at("weight_low").get<double>();
    model.config.weight_high = c.at("weight_high").get<double>();
    model.config.seed = c.at("seed").get<std::uint64_t>();

    const int p = model.config.p;
    const auto& flat = doc.at("theta");
    if (static_cast<int>(flat.size()) != p * p) {
      throw InvalidArgumentError(
          "model_from_json", "theta has " + std::to_string(flat.size()) +
                                 " entries, expected p*p");
    }
    Eigen::MatrixXd theta(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        theta(i, j) = flat[static_cast<std::size_t>(i) * p + j].get<double>();
      }
    }
    model.theta = SymmetricMatrix::from_dense(theta);
    model.hub_set = doc.at("hub_set").get<std::vector<int>>();
    model.empirical_tau =
        doc.at("empirical_tau").is_null()
            ? std::numeric_limits<double>::infinity()
            : doc.at("empirical_tau").get<double>();
    model.empirical_c = doc.at("empirical_c").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError("model_from_json", e.what());
  }
  model.sigma = invert_spd(model.theta);
  model.corr = cov_to_corr(model.sigma);
  model.inv_corr = invert_spd(model.corr);
  return model;
}

}  // namespace hubscan
