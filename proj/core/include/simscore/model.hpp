#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "simscore/errors.hpp"

namespace simscore {

inline constexpr double kSimplexTol = 1e-9;      // |sum - 1| allowed before rejection
inline constexpr double kRowSumZeroTol = 1e-12;  // K1 = 0 requirement in am1 mode
inline constexpr double kPsdTol = 1e-10;         // eigenvalue slack for PSD checks

// Parameter mode of the interaction model.
//   general   : K unconstrained, eta free
//   symmetric : K = K^T enforced, eta free
//   am1       : Aitchison A^{m-1} constraint, a = b = 0, K = K^T, K 1 = 0,
//               diagonal of K derived from the off-diagonals
//   centered  : eta = 0 known, K unconstrained
enum class Mode { general, symmetric, am1, centered };

std::string to_string(Mode mode);
std::optional<Mode> mode_from_string(const std::string& s);

// Known exponents (a, b) of the pairwise power-interaction density
//   p(x) ∝ exp(-(1/2a) (x^a)' K x^a + (1/b) eta' x^b),  x on the simplex,
// with x^0 = log x and 1/0 = 1.
struct ModelSpec {
  double a = 0.0;
  double b = 0.0;
  Mode mode = Mode::general;

  ModelSpec() = default;
  ModelSpec(double a_, double b_, Mode mode_);

  bool log_scale() const { return a == 0.0 || b == 0.0; }
};

// A single point on the probability simplex (entries >= 0, sum = 1).
struct Composition {
  Eigen::VectorXd v;
  int size() const { return static_cast<int>(v.size()); }
};

// n compositions sharing m components; rows of x are samples.
struct Dataset {
  Eigen::MatrixXd x;
  std::vector<std::string> labels;  // empty or size m

  int n() const { return static_cast<int>(x.rows()); }
  int m() const { return static_cast<int>(x.cols()); }

  // Validates every row (renormalizing within tol) against spec.
  static Dataset from_rows(const Eigen::MatrixXd& raw, const ModelSpec& spec,
                           double tol = kSimplexTol);
};

// Interaction matrix K and linear term eta with mode-dependent constraints
// checked at construction.
struct ParameterSet {
  Eigen::MatrixXd K;
  Eigen::VectorXd eta;

  int m() const { return static_cast<int>(K.rows()); }

  static ParameterSet make(Mode mode, Eigen::MatrixXd K, Eigen::VectorXd eta);
  static ParameterSet zero(Mode mode, int m);
};

Composition validate_composition(const Eigen::VectorXd& raw, const ModelSpec& spec,
                                 double tol = kSimplexTol);

// (counts + pseudocount) / sum(counts + pseudocount)
Composition close_counts(const Eigen::VectorXd& counts, double pseudocount);

// Unnormalized log-density of the a-b model at x.
double log_kernel(const ModelSpec& spec, const ParameterSet& params, const Composition& x);
double log_kernel(const ModelSpec& spec, const ParameterSet& params,
                  const Eigen::VectorXd& x);

// Which sufficient condition proved normalizability.
enum class NormCondition { CC1, CC2, CC3, CC4, Thm4_I, Thm4_II, Thm4_III };
std::string to_string(NormCondition c);

struct ValidityReport {
  enum class State { proven, unproven, violated };
  State normalizable = State::unproven;
  std::optional<NormCondition> condition_hit;  // set iff proven
  std::string details;
};

ValidityReport check_normalizability(const ModelSpec& spec, const ParameterSet& params);

// Exception cases of the identifiability theorem.
enum class NonIdentifiableCase { I_a1_b1, II_a1_b2, III_a1_eta_only, IV_2a_eq_b };
std::string to_string(NonIdentifiableCase c);

struct IdentifiabilityReport {
  bool identifiable = true;
  std::optional<NonIdentifiableCase> exception_case;
};

// Identifiable iff a != 1 and (2a = b > 0) fails.
IdentifiabilityReport check_identifiability(double a, double b);

// Maps Aitchison's (beta, gamma) parameters to (K, eta):
//   kappa_jj = 2 sum_{i != j} gamma_ji,  kappa_jk = -2 gamma_kj,  eta = beta - 1.
ParameterSet am1_from_aitchison(const Eigen::VectorXd& beta, const Eigen::MatrixXd& gamma);

// y_j = log(x_j / x_ref) for j != ref (0-based ref).
Eigen::VectorXd alr_transform(const Composition& x, int ref);
// inverse additive logistic transform; y has m-1 entries, ref gets 1/(1+sum exp)
Composition alr_inverse(const Eigen::VectorXd& y, int ref);

}  // namespace simscore
