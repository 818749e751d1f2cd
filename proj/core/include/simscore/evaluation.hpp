#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "simscore/solver.hpp"

namespace simscore {

inline constexpr double kSupportTol = 1e-10;  // |kappa| above this counts as an edge

struct TprFpr {
  double tpr = 0.0;
  double fpr = 0.0;
};

// Off-diagonal support recovery over ordered pairs:
// TPR = |S_hat ∩ S_0| / |S_0|, FPR = |S_hat \ S_0| / (m(m-1) - |S_0|).
TprFpr tpr_fpr(const ParameterSet& estimated, const ParameterSet& truth,
               double zero_tol = kSupportTol);

struct RocCurve {
  // fpr-sorted curve including (0,0) and (1,1); ties keep the best tpr
  std::vector<std::pair<double, double>> points;
  // raw per-path points in lambda order (before augmentation)
  std::vector<std::pair<double, double>> path_points;
  double auc = 0.0;
};

RocCurve roc_auc(const FitPath& path, const ParameterSet& truth,
                 double zero_tol = kSupportTol);

struct NormErrors {
  double max = 0.0;
  double frobenius = 0.0;
  double spectral = 0.0;
  // same norms divided by the corresponding norms of the truth
  double max_rel = 0.0;
  double frobenius_rel = 0.0;
  double spectral_rel = 0.0;
};

NormErrors norm_errors(const ParameterSet& estimated, const ParameterSet& truth);

// Diagonal multiplier policy: an explicit value, or the theoretical upper
// bound 1 + sqrt((tau log m + log 4)/(2n)) evaluated at the fitted n.
struct DeltaPolicy {
  std::optional<double> value;
  double tau = 4.0;

  double resolve(int n, int m) const;
};

struct CrossValResult {
  double lambda_star = 0.0;
  int index_star = 0;
  std::vector<double> lambdas;
  std::vector<double> mean_scores;
  Eigen::MatrixXd fold_scores;  // folds x n_lambda
};

// K-fold cross validation on the held-out unpenalized score-matching loss.
// Folds are balanced and assigned by a seeded permutation of the rows in a
// canonical (lexicographic) order, so the result does not depend on row order.
CrossValResult cross_validate(const Dataset& data, const ModelSpec& spec,
                              const WeightSpec& weights, const std::vector<int>& J,
                              const PathGrid& grid, int folds, std::uint64_t seed,
                              const SolverOptions& solver = {},
                              const DeltaPolicy& delta = {}, int threads = 1);

// Same scoring on a caller-provided grid (shared with the full-data path).
CrossValResult cross_validate_at(const Dataset& data, const ModelSpec& spec,
                                 const WeightSpec& weights, const std::vector<int>& J,
                                 const std::vector<double>& lambdas, int folds,
                                 std::uint64_t seed, const SolverOptions& solver = {},
                                 const DeltaPolicy& delta = {}, int threads = 1);

}  // namespace simscore
