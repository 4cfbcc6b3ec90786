#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "hubscan/ipchd.hpp"
#include "hubscan/simgen.hpp"

using hubscan::GroundTruthModel;
using hubscan::SimConfig;
using hubscan::SymmetricMatrix;

namespace {

SimConfig strong_config(int p, int t, int r, std::uint64_t seed) {
  SimConfig cfg;
  cfg.p = p;
  cfg.t = t;
  cfg.r = r;
  cfg.p_hub = 0.8;
  cfg.p_nonhub = 0.05;
  cfg.p_nonsignal = 0.005;
  cfg.delta = 5.0;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("SimConfig validation") {
  SimConfig cfg = strong_config(20, 10, 2, 1);
  CHECK_NOTHROW(cfg.validate());

  SimConfig bad = cfg;
  bad.p_nonhub = 0.9;  // >= p_hub
  CHECK_THROWS_AS(bad.validate(), hubscan::InvalidArgumentError);

  bad = cfg;
  bad.r = 11;  // > t
  CHECK_THROWS_AS(bad.validate(), hubscan::InvalidArgumentError);

  bad = cfg;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), hubscan::InvalidArgumentError);

  bad = cfg;
  bad.weight_low = 5.0;
  bad.weight_high = 4.0;
  CHECK_THROWS_AS(bad.validate(), hubscan::InvalidArgumentError);
}

TEST_CASE("degenerate probability structure forces the layout") {
  SimConfig cfg = strong_config(8, 8, 2, 99);
  cfg.p_hub = 1.0;
  cfg.p_nonhub = 0.0;
  cfg.p_nonsignal = 0.0;
  const GroundTruthModel m = generate_precision(cfg);
  REQUIRE(m.hub_set.size() == 2);
  std::vector<bool> is_hub(8, false);
  for (int h : m.hub_set) is_hub[h] = true;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      if (is_hub[i] || is_hub[j]) {
        CHECK(std::abs(m.theta(i, j)) >= cfg.weight_low);
      } else {
        CHECK(m.theta(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("spectrum floor and constant diagonal") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const GroundTruthModel m = generate_precision(strong_config(30, 20, 3, seed));
    const auto eig = symmetric_eigen(m.theta);
    CHECK(std::abs(eig.eigenvalues(29) - 5.0) <= 1e-8);
    for (int i = 1; i < 30; ++i) {
      CHECK(m.theta(i, i) == m.theta(0, 0));
    }
    CHECK(m.theta(0, 0) >= 5.0);
    CHECK_NOTHROW(cholesky(m.theta));
    for (int i = 0; i < 30; ++i) CHECK(m.corr(i, i) == 1.0);
    CHECK(m.empirical_tau > 0.0);
    CHECK(m.empirical_c >= 1.0);

    // hub_set is a sorted subset of the signal block.
    REQUIRE(m.hub_set.size() == 3);
    CHECK(std::is_sorted(m.hub_set.begin(), m.hub_set.end()));
    CHECK(m.hub_set.back() < 20);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const SimConfig cfg = strong_config(25, 25, 3, 777);
  const GroundTruthModel a = generate_precision(cfg);
  const GroundTruthModel b = generate_precision(cfg);
  CHECK(std::memcmp(a.theta.mat().data(), b.theta.mat().data(),
                    sizeof(double) * 25 * 25) == 0);
  CHECK(a.hub_set == b.hub_set);

  SimConfig other = cfg;
  other.seed = 778;
  const GroundTruthModel c = generate_precision(other);
  CHECK(std::memcmp(a.theta.mat().data(), c.theta.mat().data(),
                    sizeof(double) * 25 * 25) != 0);
}

TEST_CASE("degenerate graph fails after retries") {
  SimConfig cfg;
  cfg.p = 1;
  cfg.t = 1;
  cfg.r = 1;
  cfg.p_hub = 0.5;
  cfg.p_nonhub = 0.1;
  cfg.p_nonsignal = 0.0;
  // No pairs exist at p = 1, so the adjacency can never be non-empty.
  CHECK_THROWS_AS(generate_precision(cfg), hubscan::DegenerateGraphError);
}

TEST_CASE("strong config separates hubs in nearly every seed") {
  int tau_ok = 0;
  int top_r_ok = 0;
  const int seeds = 30;
  for (int seed = 0; seed < seeds; ++seed) {
    const GroundTruthModel m =
        generate_precision(strong_config(100, 100, 5, 9000 + seed));
    // Direct column-norm oracle for the weighted degrees on Xi.
    const int p = 100;
    std::vector<double> alpha(p, 0.0);
    for (int k = 0; k < p; ++k) {
      for (int l = 0; l < p; ++l) {
        alpha[k] += m.inv_corr(l, k) * m.inv_corr(l, k);
      }
    }
    std::vector<bool> is_hub(p, false);
    for (int h : m.hub_set) is_hub[h] = true;
    double hub_min = 1e300, nonhub_max = 0.0;
    for (int k = 0; k < p; ++k) {
      if (is_hub[k]) hub_min = std::min(hub_min, alpha[k]);
      else nonhub_max = std::max(nonhub_max, alpha[k]);
    }
    const double tau = hub_min / nonhub_max;
    CHECK(tau == doctest::Approx(m.empirical_tau).epsilon(1e-10));
    if (tau > 1.0) ++tau_ok;
    if (hub_min > nonhub_max) ++top_r_ok;
  }
  CHECK(tau_ok >= 28);     // >= 95% of seeds in the full acceptance run
  CHECK(top_r_ok >= 28);  // hub planting: hubs are the top-r weighted degrees
}

TEST_CASE("sample_gaussian") {
  SUBCASE("n = 1 yields a single valid row") {
    const GroundTruthModel m = generate_precision(strong_config(10, 10, 2, 5));
    const auto x = sample_gaussian(m, 1, 123);
    CHECK(x.n() == 1);
    CHECK(x.p() == 10);
  }
  SUBCASE("fixed seed reproduces bitwise, different seed differs") {
    const GroundTruthModel m = generate_precision(strong_config(10, 10, 2, 5));
    const auto a = sample_gaussian(m, 20, 42);
    const auto b = sample_gaussian(m, 20, 42);
    CHECK(std::memcmp(a.values().data(), b.values().data(),
                      sizeof(double) * 200) == 0);
    const auto c = sample_gaussian(m, 20, 43);
    CHECK(std::memcmp(a.values().data(), c.values().data(),
                      sizeof(double) * 200) != 0);
  }
  SUBCASE("identity precision gives standard normal columns") {
    GroundTruthModel m;
    m.theta = SymmetricMatrix::identity(5);
    m.sigma = SymmetricMatrix::identity(5);
    m.corr = SymmetricMatrix::identity(5);
    m.inv_corr = SymmetricMatrix::identity(5);
    int ok = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = sample_gaussian(m, 4000, 1000 + trial);
      const auto s = sample_covariance(x);
      const double bound = 4.0 * std::sqrt(5.0 / 4000.0);
      const double dev =
          (s.mat() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff();
      if (dev <= bound) ++ok;
    }
    CHECK(ok >= 9);
  }
  SUBCASE("use_correlation samples from the correlation scale") {
    const GroundTruthModel m = generate_precision(strong_config(8, 8, 2, 31));
    const auto x = sample_gaussian(m, 20000, 7, true);
    const auto s = sample_covariance(x);
    // Diagonal of the population covariance is 1 on this scale.
    for (int i = 0; i < 8; ++i) {
      CHECK(s(i, i) == doctest::Approx(1.0).epsilon(0.08));
    }
  }
}

TEST_CASE("model JSON round trip") {
  const GroundTruthModel m = generate_precision(strong_config(12, 10, 2, 2024));
  const std::string doc = hubscan::model_to_json(m);
  const GroundTruthModel back = hubscan::model_from_json(doc);
  CHECK(back.config.p == 12);
  CHECK(back.config.seed == 2024);
  CHECK(back.hub_set == m.hub_set);
  CHECK(back.empirical_tau == doctest::Approx(m.empirical_tau));
  CHECK(std::memcmp(back.theta.mat().data(), m.theta.mat().data(),
                    sizeof(double) * 144) == 0);
  // Reloaded model keeps the spectrum floor.
  const auto eig = symmetric_eigen(back.theta);
  CHECK(std::abs(eig.eigenvalues(11) - 5.0) <= 1e-8);

  CHECK_THROWS_AS(hubscan::model_from_json("{not json"),
                  hubscan::InvalidArgumentError);
}
