#pragma once

#include <cstdint>

#include "simscore/model.hpp"

namespace simscore {

struct McmcOptions {
  int burn_in = 2000;      // adaptation sweeps, discarded
  int thin = 10;           // keep every thin-th sweep
  double step_size = 0.5;  // initial per-coordinate proposal sd
  std::uint64_t seed = 0;

  void validate() const;
};

struct McmcDiagnostics {
  double acceptance_rate = 0.0;  // post-adaptation, averaged over coordinates
  Eigen::VectorXd step_sizes;    // frozen after burn-in
};

// n independent Dirichlet(alpha) rows.
Dataset sample_dirichlet(const Eigen::VectorXd& alpha, int n, std::uint64_t seed);

// Additive logistic normal: y = alr(x) is N(K_{-m,-m}^{-1} eta_{-m}, K_{-m,-m}^{-1}).
// Requires K 1 = 0, K = K', K_{-m,-m} positive definite, 1'eta = -m.
Dataset sample_logistic_normal(const ParameterSet& params, int n, std::uint64_t seed);

// Componentwise random-walk Metropolis in alr coordinates with step-size
// adaptation during burn-in (30% target), frozen afterwards. Target density
// is the a-b kernel times the additive-logistic Jacobian prod_j x_j.
Dataset sample_ab_mcmc(const ModelSpec& spec, const ParameterSet& params, int n,
                       const McmcOptions& opts, McmcDiagnostics* diag = nullptr);

// Banded ground truth with Laplacian sign: off-diagonals -w_d for lag d <= s,
// w_d = 1 - d/(s+1); diagonal makes every row sum zero.
ParameterSet banded_K(int m, int s);

// log target of the alr chain for a given y (exposed for tests)
double alr_log_target(const ModelSpec& spec, const ParameterSet& params,
                      const Eigen::VectorXd& y);

}  // namespace simscore
