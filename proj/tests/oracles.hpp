// Test-only oracles, deliberately independent of the library's solver path:
// a cyclic Jacobi eigensolver and plain random-matrix generators.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

struct JacobiResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
inline JacobiResult jacobi_eigen(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) < 1e-14 * scale) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t =
            (theta >= 0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a(x, x) > a(y, y); });
  JacobiResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

inline Eigen::MatrixXd random_symmetric(int p, std::mt19937_64& rng,
                                        double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i) {
    m(i, i) = u(rng);
    for (int j = i + 1; j < p; ++j) {
      m(i, j) = m(j, i) = u(rng);
    }
  }
  return m;
}

// Random orthogonal basis times a given spectrum.
inline Eigen::MatrixXd random_spd(int p, std::mt19937_64& rng,
                                  double eig_lo = 0.5, double eig_hi = 5.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) a(i, j) = g(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> u(eig_lo, eig_hi);
  Eigen::VectorXd eigs(p);
  for (int i = 0; i < p; ++i) eigs(i) = u(rng);
  return q * eigs.asDiagonal() * q.transpose();
}

}  // namespace oracles
