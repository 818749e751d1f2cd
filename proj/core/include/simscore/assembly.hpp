#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "simscore/model.hpp"
#include "simscore/weights.hpp"

namespace simscore {

// Index map from parameters to rows/columns of the quadratic loss.
// Full layout: theta = (vec(K), eta), column-major vec.
// Reduced (am1) layout: theta = (vec(K_off), eta) where column j of K_off
// stacks the off-diagonal entries kappa_{-j,j} in increasing row order.
struct ParamLayout {
  int m = 0;
  Mode mode = Mode::general;
  bool has_eta = true;     // false in centered mode
  bool am1_reduced = false;

  int k_slots() const { return am1_reduced ? m * (m - 1) : m * m; }
  int dim() const { return k_slots() + (has_eta ? m : 0); }

  int k_slot(int r, int c) const {
    if (!am1_reduced) return c * m + r;
    return c * (m - 1) + (r < c ? r : r - 1);  // r != c
  }
  int eta_slot(int j) const { return k_slots() + j; }

  bool is_eta_slot(int s) const { return s >= k_slots(); }
  bool is_k_diag_slot(int s) const {
    if (am1_reduced || is_eta_slot(s)) return false;
    return s % (m + 1) == 0;  // c*m + r with r == c
  }

  static ParamLayout full(int m, Mode mode);
  ParamLayout reduced() const;  // after the A^{m-1} transform
};

// Symmetric quadratic-form matrix, dense below kDenseDimLimit and
// compressed-column sparse above (the averaged loss is block sparse).
class QuadraticTerm {
 public:
  static constexpr int kDenseDimLimit = 4500;

  QuadraticTerm() = default;
  static QuadraticTerm zero_dense(int dim);
  static QuadraticTerm from_dense(Eigen::MatrixXd g);
  static QuadraticTerm from_sparse(Eigen::SparseMatrix<double> g);

  int dim() const;
  bool is_dense() const { return dense_; }

  const Eigen::MatrixXd& dense() const { return d_; }
  Eigen::MatrixXd& dense() { return d_; }
  const Eigen::SparseMatrix<double>& sparse() const { return s_; }
  Eigen::MatrixXd to_dense() const;

  Eigen::VectorXd diagonal() const;
  Eigen::VectorXd product(const Eigen::VectorXd& v) const;  // G v
  double quad(const Eigen::VectorXd& v) const;              // v' G v
  // q += coeff * G.col(t)
  void add_col_multiple(Eigen::VectorXd& q, int t, double coeff) const;
  double coeff(int r, int c) const;

  void scale_diagonal(const Eigen::VectorXd& factors);
  // A G A' for sparse A (used by the C(j) transform and pair-tying reduction)
  QuadraticTerm congruence(const Eigen::SparseMatrix<double>& a) const;

  double min_eigenvalue() const;  // dense path only; diagnostic

 private:
  bool dense_ = true;
  Eigen::MatrixXd d_;
  Eigen::SparseMatrix<double> s_;
};

// Assembled quadratic score-matching loss 1/2 theta' Gamma theta - g' theta.
// gamma/g are averages over the removed-coordinate set J; the diagonal
// multiplier is tracked as state and applied via effective_gamma().
struct QuadraticScoreLoss {
  QuadraticTerm gamma;   // without the diagonal multiplier
  Eigen::VectorXd g;
  ParamLayout layout;
  ModelSpec spec;
  Eigen::VectorXd alpha;          // weight exponents used
  Eigen::MatrixXd resolved_C;     // m x |J|; column k = truncation for J[k]
  std::vector<int> removed;       // J (0-based dropped coordinates)
  int n = 0;
  double delta = 1.0;

  int dim() const { return layout.dim(); }
  // gamma with diagonal multiplied by delta (K block only after the am1 transform)
  QuadraticTerm effective_gamma() const;
  Eigen::VectorXd delta_factors() const;
  std::uint64_t fingerprint() const;
};

struct AssembleOptions {
  bool force_sparse = false;  // storage override, used by tests
  // pre-resolved truncation constants (m x |J|), e.g. carrying a training
  // fold's quantiles onto held-out data
  std::optional<Eigen::MatrixXd> C_override;
};

// Builds Gamma and g for the dataset, averaging over dropped coordinates in J.
QuadraticScoreLoss assemble(const Dataset& data, const ModelSpec& spec,
                            const WeightSpec& weights, const std::vector<int>& J,
                            const AssembleOptions& opts = {});

// Same loss evaluated directly from the per-sample derivative formulas;
// reference oracle for assemble (independent code path).
double empirical_loss_direct(const Dataset& data, const ModelSpec& spec,
                             const WeightSpec& weights, const ParameterSet& params,
                             const std::vector<int>& J);

// Sets the diagonal-multiplier state (delta >= 1).
QuadraticScoreLoss apply_diagonal_multiplier(QuadraticScoreLoss loss, double delta);

// 1 + sqrt((tau log m + log 4) / (2n))
double diagonal_multiplier_bound(int n, int m, double tau);

// C(j): (m-1) x m, column j all -1, row r has +1 at column (r < j ? r : r+1).
Eigen::MatrixXd build_C_matrix(int j, int m);

// Marginalizes out the diagonal of K under the A^{m-1} constraint:
// Gamma -> T Gamma T', g -> T g with T = blockdiag(C(1..m), I_m).
QuadraticScoreLoss transform_am1(const QuadraticScoreLoss& loss);

// theta in slot order for the loss layout.
Eigen::VectorXd pack_parameters(const ParamLayout& layout, const ParameterSet& params);
// inverse of pack; am1 layouts derive the K diagonal from the off-diagonals
ParameterSet unpack_parameters(const ParamLayout& layout, const Eigen::VectorXd& theta);

}  // namespace simscore
