#pragma once

#include <limits>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "simscore/model.hpp"

namespace simscore {

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

// Power weights h_j(t) = t^{alpha_j} composed with the simplex boundary
// distance phi. Truncation is either an explicit per-coordinate constant
// (possibly +inf) or a data-driven sample quantile at probability pi.
struct WeightSpec {
  Eigen::VectorXd alpha;            // size m, entries >= 0
  std::optional<double> pi;         // quantile in (0, 1]
  std::optional<Eigen::MatrixXd> C; // m x m; C(j, d) truncates phi_j when d is dropped

  static WeightSpec power(int m, double exponent, double pi = 1.0);
  static WeightSpec with_constant(int m, double exponent, double c);

  void validate(int m) const;
  // truncation vector for a given dropped coordinate (size m; entry `dropped` unused)
  Eigen::VectorXd truncation_for(const Dataset& data, int dropped) const;
};

// phi_{C_j, j}(x) = min{C_j, x_j, x_dropped}
double phi(const Composition& x, int j, double c_j, int dropped);
double phi(const Eigen::VectorXd& x, int j, double c_j, int dropped);

struct HPhi {
  double value = 0.0;    // phi^alpha
  double d_value = 0.0;  // d/dx_j of h(phi(x)) with x_dropped = 1 - sum of the rest
};

// Derivative sign: +1 when x_j is the strict minimizer, -1 when x_dropped is
// (chain rule through x_dropped), 0 when the truncation binds or at ties.
HPhi hphi_and_deriv(const Eigen::VectorXd& x, int j, double alpha_j, double c_j,
                    int dropped);

// Type-1 empirical quantile (k = ceil(pi * n)-th smallest) of
// min(x_j, x_dropped, 1) per free coordinate j.
Eigen::VectorXd select_truncation(const Dataset& data, double pi, int dropped);

struct HExponentReport {
  bool pass = true;          // practice-grade gate used by assembly
  bool known = true;         // false when the check needs an unavailable eta0
  bool theory_pass = true;   // alpha_j >= max{1, 2-a, 2-b} (consistency-theory grade)
  std::string binding;       // the constraint that binds (or failed)
};

// Checks the score-matching weight assumptions for (spec, alpha), optionally
// against a known eta0 where the bound depends on it.
HExponentReport validate_h_exponents(const ModelSpec& spec, const WeightSpec& weights,
                                     const std::optional<Eigen::VectorXd>& eta0 = {});

}  // namespace simscore
