#pragma once

// Shared helpers for the test suites. The solvers and closed forms here are
// reference oracles: they must stay independent of the library code paths
// they are used to check.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "simscore/model.hpp"
#include "simscore/rng.hpp"

namespace testsup {

// FISTA with gradient restart on 1/2 x'Ax - b'x + sum tau_i |x_i|.
// Run to a much tighter tolerance than anything it is compared against.
inline Eigen::VectorXd prox_gradient_solve(const Eigen::MatrixXd& A,
                                           const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& tau,
                                           int max_iter = 500000, double tol = 1e-12) {
  const int n = static_cast<int>(b.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double L = std::max(es.eigenvalues().maxCoeff(), 1e-12);

  auto prox = [&](Eigen::VectorXd v) {
    for (int i = 0; i < n; ++i) {
      const double t = tau[i] / L;
      if (v[i] > t) {
        v[i] -= t;
      } else if (v[i] < -t) {
        v[i] += t;
      } else {
        v[i] = 0.0;
      }
    }
    return v;
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(A * x) - b.dot(x) + tau.dot(x.cwiseAbs());
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n), x_prev = x, y = x;
  double t_k = 1.0;
  double last_obj = objective(x);
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd grad = A * y - b;
    x = prox(y - grad / L);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
    y = x + ((t_k - 1.0) / t_next) * (x - x_prev);
    if ((y - x).dot(x - x_prev) > 0.0) {  // restart
      y = x;
      t_k = 1.0;
    } else {
      t_k = t_next;
    }
    x_prev = x;
    const double obj = objective(x);
    if (std::abs(last_obj - obj) <= tol * (1.0 + std::abs(obj))) {
      if (++stall > 20) break;
    } else {
      stall = 0;
    }
    last_obj = obj;
  }
  return x;
}

inline double digamma(double x) {
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
  return result;
}

inline double trigamma(double x) {
  double result = 0.0;
  while (x < 6.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  result += inv * (1.0 + 0.5 * inv + inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 / 42.0)));
  return result;
}

// Monte-Carlo standard error of the mean via batch means (autocorrelation aware),
// floored at the naive iid value.
inline double batch_means_mcse(const std::vector<double>& chain, int batches = 40) {
  const int n = static_cast<int>(chain.size());
  const int bsize = std::max(1, n / batches);
  const int usable = (n / bsize) * bsize;
  const int nb = usable / bsize;
  double mean = 0.0;
  for (int i = 0; i < usable; ++i) mean += chain[static_cast<std::size_t>(i)];
  mean /= usable;
  double var_b = 0.0;
  for (int b = 0; b < nb; ++b) {
    double bm = 0.0;
    for (int i = 0; i < bsize; ++i) bm += chain[static_cast<std::size_t>(b * bsize + i)];
    bm /= bsize;
    var_b += (bm - mean) * (bm - mean);
  }
  var_b /= std::max(1, nb - 1);
  const double mcse = std::sqrt(var_b / nb);
  double var_iid = 0.0;
  for (int i = 0; i < usable; ++i) {
    var_iid += (chain[static_cast<std::size_t>(i)] - mean) *
               (chain[static_cast<std::size_t>(i)] - mean);
  }
  var_iid /= std::max(1, usable - 1);
  return std::max(mcse, std::sqrt(var_iid / usable));
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Area of the region under a piecewise-linear curve from (0,0) to (1,1),
// computed by the shoelace formula on the closed polygon with corner (1,0).
inline double shoelace_auc(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> poly = pts;
  poly.emplace_back(1.0, 0.0);  // close below
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& [x0, y0] = poly[i];
    const auto& [x1, y1] = poly[(i + 1) % poly.size()];
    twice += x0 * y1 - x1 * y0;
  }
  return std::abs(twice) / 2.0;
}

// random strictly-positive composition
inline Eigen::VectorXd random_simplex_point(simscore::Rng& rng, int m) {
  Eigen::VectorXd x(m);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    x[j] = 0.05 + rng.uniform();
    total += x[j];
  }
  return x / total;
}

inline simscore::Dataset random_dataset(simscore::Rng& rng, int n, int m) {
  simscore::Dataset d;
  d.x.resize(n, m);
  for (int i = 0; i < n; ++i) d.x.row(i) = random_simplex_point(rng, m).transpose();
  return d;
}

inline Eigen::MatrixXd random_psd(simscore::Rng& rng, int dim, double ridge) {
  Eigen::MatrixXd b(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) b(r, c) = rng.normal();
  }
  return b.transpose() * b / dim + ridge * Eigen::MatrixXd::Identity(dim, dim);
}

}  // namespace testsup
