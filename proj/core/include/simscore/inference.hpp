#pragma once

#include "simscore/pipeline.hpp"

namespace simscore {

struct PermTestConfig {
  EstimateConfig fit;  // shared pipeline configuration for every refit
  int B = 500;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct PermTestResult {
  double global_p = 1.0;
  long observed_stat = 0;            // |S(K1) symdiff S(K2)| over ordered pairs
  Eigen::MatrixXd local_p;           // raw p-values, diagonal NaN
  Eigen::MatrixXd local_p_adjusted;  // Benjamini-Yekutieli over the tested pairs
  int B = 0;
  std::uint64_t config_fingerprint = 0;
  ParameterSet k1{Eigen::MatrixXd(), Eigen::VectorXd()};  // observed fits
  ParameterSet k2{Eigen::MatrixXd(), Eigen::VectorXd()};
};

// Runs the permutation scheme once and evaluates both the global and the
// local statistics from the same replicate fits.
PermTestResult differential_network_test(const Dataset& d1, const Dataset& d2,
                                         const PermTestConfig& cfg);

double global_perm_test(const Dataset& d1, const Dataset& d2, const PermTestConfig& cfg);
Eigen::MatrixXd local_perm_test(const Dataset& d1, const Dataset& d2,
                                const PermTestConfig& cfg);

// Benjamini-Yekutieli adjustment: sorted ascending,
// adj_(i) = min(1, min_{j >= i} k c(k) p_(j)/j), c(k) = sum_{l<=k} 1/l.
std::vector<double> by_adjust(const std::vector<double>& p);

}  // namespace simscore
