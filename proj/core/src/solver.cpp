#include "simscore/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace simscore {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

Eigen::VectorXd ReducedProblem::thresholds(double lambda_K, double lambda_eta) const {
  Eigen::VectorXd tau(nvars());
  for (int v = 0; v < nvars(); ++v) {
    const double lam = vars[static_cast<std::size_t>(v)].is_eta ? lambda_eta : lambda_K;
    tau[v] = lam * vars[static_cast<std::size_t>(v)].pen_mult;
  }
  return tau;
}

Eigen::VectorXd ReducedProblem::expand(const Eigen::VectorXd& theta_red) const {
  return D * theta_red;
}

Eigen::VectorXd ReducedProblem::restrict(const Eigen::VectorXd& theta_slots) const {
  Eigen::VectorXd out(nvars());
  for (int v = 0; v < nvars(); ++v) {
    out[v] = theta_slots[vars[static_cast<std::size_t>(v)].slot1];
  }
  return out;
}

double ReducedProblem::objective(const Eigen::VectorXd& theta_red, double lambda_K,
                                 double lambda_eta) const {
  const Eigen::VectorXd tau = thresholds(lambda_K, lambda_eta);
  return 0.5 * A.quad(theta_red) - b.dot(theta_red) +
         tau.dot(theta_red.cwiseAbs());
}

ReducedProblem reduce(const QuadraticScoreLoss& loss, const SolverOptions& opts) {
  const ParamLayout& lay = loss.layout;
  const Mode mode = lay.mode;
  require(mode != Mode::am1 || lay.am1_reduced, Err::WrongMode,
          "am1 losses must pass through transform_am1 before solving");
  if (mode == Mode::symmetric || mode == Mode::am1) {
    require(!opts.penalize_K_diagonal, Err::InvalidModelSpec,
            "the K diagonal is never penalized in symmetric/am1 modes");
  }
  const int m = lay.m;
  const bool tie_pairs = mode == Mode::symmetric || mode == Mode::am1;

  ReducedProblem p;
  p.layout = lay;
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < m; ++r) {
      if (lay.am1_reduced && r == c) continue;
      if (r == c) {
        p.vars.push_back({lay.k_slot(r, c), -1, false,
                          opts.penalize_K_diagonal ? 1 : 0});
      } else if (!tie_pairs) {
        p.vars.push_back({lay.k_slot(r, c), -1, false, 1});
      } else if (r > c) {
        // pair emitted at its first slot in column-major order
        p.vars.push_back({lay.k_slot(r, c), lay.k_slot(c, r), false, 2});
      }
    }
  }
  if (lay.has_eta) {
    for (int j = 0; j < m; ++j) {
      p.vars.push_back({lay.eta_slot(j), -1, true, opts.penalize_eta ? 1 : 0});
    }
  }

  Eigen::SparseMatrix<double> dt(p.nvars(), lay.dim());  // vars x slots
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(2 * p.nvars()));
  for (int v = 0; v < p.nvars(); ++v) {
    const ReducedVar& rv = p.vars[static_cast<std::size_t>(v)];
    trips.emplace_back(v, rv.slot1, 1.0);
    if (rv.slot2 >= 0) trips.emplace_back(v, rv.slot2, 1.0);
  }
  dt.setFromTriplets(trips.begin(), trips.end());

  p.A = loss.effective_gamma().congruence(dt);
  p.b = dt * loss.g;
  p.D = dt.transpose();
  return p;
}

namespace {

double kkt_residual(const ReducedProblem& p, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& q, const Eigen::VectorXd& tau) {
  double worst = 0.0;
  for (int v = 0; v < p.nvars(); ++v) {
    const double grad = q[v] - p.b[v];
    double viol;
    if (theta[v] > 0.0) {
      viol = std::abs(grad + tau[v]);
    } else if (theta[v] < 0.0) {
      viol = std::abs(grad - tau[v]);
    } else {
      viol = std::max(0.0, std::abs(grad) - tau[v]);
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

}  // namespace

FitResult solve_reduced(const ReducedProblem& p, const SolverOptions& opts,
                        const std::optional<Eigen::VectorXd>& init) {
  require(opts.max_sweeps >= 1, Err::InvalidModelSpec, "max_sweeps must be >= 1");
  require(opts.tol > 0.0, Err::InvalidModelSpec, "tol must be positive");
  require(opts.lambda_K >= 0.0 && opts.lambda_eta >= 0.0, Err::InvalidModelSpec,
          "penalties must be nonnegative");
  const int nv = p.nvars();
  const Eigen::VectorXd tau = p.thresholds(opts.lambda_K, opts.lambda_eta);
  const Eigen::VectorXd diag = p.A.diagonal();

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(nv);
  if (init) {
    require(init->size() == nv, Err::DimensionMismatch, "bad warm-start dimension");
    theta = *init;
  }
  Eigen::VectorXd q = p.A.product(theta);

  std::vector<int> order(static_cast<std::size_t>(nv));
  if (!opts.visit_order.empty()) {
    require(static_cast<int>(opts.visit_order.size()) == nv, Err::DimensionMismatch,
            "visit_order must cover every variable");
    order = opts.visit_order;
  } else {
    for (int v = 0; v < nv; ++v) order[static_cast<std::size_t>(v)] = v;
  }

  FitResult res;
  res.lambda_K = opts.lambda_K;
  res.lambda_eta = opts.lambda_eta;

  auto update = [&](int v) -> double {
    const double att = diag[v];
    const double resid = p.b[v] - (q[v] - att * theta[v]);
    double z;
    if (att <= 0.0) {
      // PSD matrix: a zero diagonal forces a zero row; anything else is
      // unrecoverable for this coordinate
      if (std::abs(resid) <= tau[v] + 1e-12) {
        z = 0.0;
      } else {
        fail(Err::ZeroDiagonal,
             "zero quadratic coefficient on an active coordinate; "
             "increase the diagonal multiplier or check the data");
      }
    } else {
      z = tau[v] > 0.0 ? soft_threshold(resid, tau[v]) / att : resid / att;
    }
    const double delta = z - theta[v];
    if (delta != 0.0) {
      p.A.add_col_multiple(q, v, delta);
      theta[v] = z;
    }
    return std::abs(delta) / std::max(1.0, std::abs(z));
  };

  std::vector<int> active;
  int sweeps = 0;
  auto record = [&]() {
    if (opts.record_objective) {
      res.objective_trace.push_back(0.5 * theta.dot(q) - p.b.dot(theta) +
                                    tau.dot(theta.cwiseAbs()));
    }
  };
  while (sweeps < opts.max_sweeps) {
    // full sweep: may activate new coordinates and certifies convergence
    ++sweeps;
    double max_rel = 0.0;
    for (int v : order) max_rel = std::max(max_rel, update(v));
    record();
    if (max_rel < opts.tol) {
      q = p.A.product(theta);  // refresh against incremental drift
      if (kkt_residual(p, theta, q, tau) <= opts.kkt_tol) {
        res.converged = true;
        break;
      }
      continue;
    }
    // settle the current active set before the next full sweep
    active.clear();
    for (int v : order) {
      if (theta[v] != 0.0 || tau[v] == 0.0) active.push_back(v);
    }
    while (sweeps < opts.max_sweeps) {
      ++sweeps;
      double mr = 0.0;
      for (int v : active) mr = std::max(mr, update(v));
      record();
      if (mr < opts.tol) break;
    }
  }

  q = p.A.product(theta);
  res.kkt_violation = kkt_residual(p, theta, q, tau);
  if (res.kkt_violation <= opts.kkt_tol) res.converged = true;
  res.sweeps_used = sweeps;
  res.objective = 0.5 * theta.dot(q) - p.b.dot(theta) + tau.dot(theta.cwiseAbs());
  res.theta = std::move(theta);
  res.params = unpack_parameters(p.layout, p.expand(res.theta));
  return res;
}

FitResult coordinate_descent(const QuadraticScoreLoss& loss, const SolverOptions& opts,
                             const std::optional<ParameterSet>& init) {
  const ReducedProblem p = reduce(loss, opts);
  std::optional<Eigen::VectorXd> theta0;
  if (init) {
    theta0 = p.restrict(pack_parameters(loss.layout, *init));
  }
  return solve_reduced(p, opts, theta0);
}

double lambda_max_reduced(const ReducedProblem& p) {
  std::vector<int> unpen;
  for (int v = 0; v < p.nvars(); ++v) {
    if (p.vars[static_cast<std::size_t>(v)].pen_mult == 0) unpen.push_back(v);
  }
  Eigen::VectorXd r = p.b;
  if (!unpen.empty()) {
    const int k = static_cast<int>(unpen.size());
    Eigen::MatrixXd auu(k, k);
    Eigen::VectorXd bu(k);
    for (int i = 0; i < k; ++i) {
      bu[i] = p.b[unpen[static_cast<std::size_t>(i)]];
      for (int j = 0; j < k; ++j) {
        auu(i, j) = p.A.coeff(unpen[static_cast<std::size_t>(i)],
                              unpen[static_cast<std::size_t>(j)]);
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(auu);
    Eigen::VectorXd xu = ldlt.solve(bu);
    require(ldlt.info() == Eigen::Success &&
                (auu * xu - bu).norm() <= 1e-8 * std::max(1.0, bu.norm()),
            Err::SingularUnpenalizedBlock,
            "unpenalized block is singular; increase delta or reduce J overlap");
    // residual of the penalized coordinates at the exact unpenalized solution
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p.nvars());
    for (int i = 0; i < k; ++i) theta[unpen[static_cast<std::size_t>(i)]] = xu[i];
    r = p.b - p.A.product(theta);
  }
  double lam = 0.0;
  for (int v = 0; v < p.nvars(); ++v) {
    const int mult = p.vars[static_cast<std::size_t>(v)].pen_mult;
    if (mult == 0) continue;
    lam = std::max(lam, std::abs(r[v]) / static_cast<double>(mult));
  }
  return lam;
}

double lambda_max(const QuadraticScoreLoss& loss, const SolverOptions& opts) {
  return lambda_max_reduced(reduce(loss, opts));
}

FitPath fit_path(const QuadraticScoreLoss& loss, const SolverOptions& opts,
                 const PathGrid& grid) {
  require(grid.n_lambda >= 1, Err::InvalidModelSpec, "n_lambda must be >= 1");
  require(grid.ratio > 0.0 && grid.ratio <= 1.0, Err::InvalidModelSpec,
          "ratio must be in (0, 1]");
  const ReducedProblem p = reduce(loss, opts);
  const double lmax = lambda_max_reduced(p);
  std::vector<double> lambdas(static_cast<std::size_t>(grid.n_lambda));
  for (int k = 0; k < grid.n_lambda; ++k) {
    const double t = grid.n_lambda == 1
                         ? 0.0
                         : static_cast<double>(k) / static_cast<double>(grid.n_lambda - 1);
    lambdas[static_cast<std::size_t>(k)] = lmax * std::pow(grid.ratio, t);
  }

  FitPath path;
  path.lambdas = lambdas;
  path.loss_fingerprint = loss.fingerprint();
  std::optional<Eigen::VectorXd> warm;
  for (double lam : lambdas) {
    SolverOptions o = opts;
    o.lambda_K = lam;
    o.lambda_eta = opts.penalize_eta ? lam : 0.0;
    FitResult fit = solve_reduced(p, o, warm);
    warm = fit.theta;
    path.fits.push_back(std::move(fit));
  }
  return path;
}

FitPath fit_path_at(const QuadraticScoreLoss& loss, const SolverOptions& opts,
                    const std::vector<double>& lambdas) {
  require(!lambdas.empty(), Err::InvalidModelSpec, "empty lambda grid");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    require(lambdas[i] < lambdas[i - 1], Err::InvalidModelSpec,
            "lambda grid must be strictly decreasing");
  }
  const ReducedProblem p = reduce(loss, opts);
  FitPath path;
  path.lambdas = lambdas;
  path.loss_fingerprint = loss.fingerprint();
  std::optional<Eigen::VectorXd> warm;
  for (double lam : lambdas) {
    SolverOptions o = opts;
    o.lambda_K = lam;
    o.lambda_eta = opts.penalize_eta ? lam : 0.0;
    FitResult fit = solve_reduced(p, o, warm);
    warm = fit.theta;
    path.fits.push_back(std::move(fit));
  }
  return path;
}

}  // namespace simscore
