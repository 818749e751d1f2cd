#pragma once

#include <optional>
#include <vector>

#include "simscore/assembly.hpp"

namespace simscore {

struct SolverOptions {
  int max_sweeps = 1000;
  double tol = 1e-8;        // max relative coordinate change per sweep
  double kkt_tol = 1e-6;    // KKT residual required to declare convergence
  bool penalize_eta = true;
  bool penalize_K_diagonal = false;  // must stay false in symmetric/am1 modes
  double lambda_K = 0.0;
  double lambda_eta = 0.0;
  bool record_objective = true;
  std::vector<int> visit_order;  // optional cyclic order override (testing)
};

struct PathGrid {
  int n_lambda = 50;
  double ratio = 0.01;  // lambda_min / lambda_max
};

// One free variable of the reduced problem: a single slot, or a symmetric
// pair kappa_{jk} = kappa_{kj} collapsed to one coordinate.
struct ReducedVar {
  int slot1 = -1;
  int slot2 = -1;        // -1 for singles
  bool is_eta = false;
  int pen_mult = 0;      // number of penalized slots behind this variable
};

// theta_slots = D theta_red; A = D' Gamma_delta D, b = D' g.
struct ReducedProblem {
  QuadraticTerm A;
  Eigen::VectorXd b;
  std::vector<ReducedVar> vars;
  Eigen::SparseMatrix<double> D;  // slots x vars
  ParamLayout layout;

  int nvars() const { return static_cast<int>(vars.size()); }
  Eigen::VectorXd thresholds(double lambda_K, double lambda_eta) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& theta_red) const;  // to slot space
  Eigen::VectorXd restrict(const Eigen::VectorXd& theta_slots) const;
  double objective(const Eigen::VectorXd& theta_red, double lambda_K,
                   double lambda_eta) const;
};

ReducedProblem reduce(const QuadraticScoreLoss& loss, const SolverOptions& opts);

struct FitResult {
  ParameterSet params{Eigen::MatrixXd(), Eigen::VectorXd()};
  Eigen::VectorXd theta;  // reduced coordinates (warm-start carrier)
  double lambda_K = 0.0;
  double lambda_eta = 0.0;
  int sweeps_used = 0;
  bool converged = false;
  double kkt_violation = 0.0;
  double objective = 0.0;
  std::vector<double> objective_trace;  // per sweep, when recorded
};

struct FitPath {
  std::vector<FitResult> fits;   // ordered by strictly decreasing lambda
  std::vector<double> lambdas;
  std::uint64_t loss_fingerprint = 0;
};

double soft_threshold(double z, double t);

// Cyclic coordinate descent on the reduced problem. Convergence requires both
// the relative-change criterion and the KKT residual below kkt_tol.
FitResult solve_reduced(const ReducedProblem& problem, const SolverOptions& opts,
                        const std::optional<Eigen::VectorXd>& init = {});

FitResult coordinate_descent(const QuadraticScoreLoss& loss, const SolverOptions& opts,
                             const std::optional<ParameterSet>& init = {});

// Smallest lambda for which every penalized coordinate is zero (unpenalized
// block solved exactly). Assumes lambda_eta = lambda_K for penalized eta.
double lambda_max(const QuadraticScoreLoss& loss, const SolverOptions& opts);
double lambda_max_reduced(const ReducedProblem& problem);

// Geometric grid from lambda_max down to ratio * lambda_max, warm-started.
FitPath fit_path(const QuadraticScoreLoss& loss, const SolverOptions& opts,
                 const PathGrid& grid);
// Same but on a caller-provided lambda sequence (strictly decreasing).
FitPath fit_path_at(const QuadraticScoreLoss& loss, const SolverOptions& opts,
                    const std::vector<double>& lambdas);

}  // namespace simscore
