#include "simscore/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "simscore/parallel.hpp"
#include "simscore/rng.hpp"

namespace simscore {

TprFpr tpr_fpr(const ParameterSet& estimated, const ParameterSet& truth, double zero_tol) {
  const int m = truth.m();
  require(estimated.m() == m, Err::DimensionMismatch, "dimension mismatch");
  long true_edges = 0, hits = 0, false_edges = 0;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      if (r == c) continue;
      const bool in_truth = std::abs(truth.K(r, c)) > zero_tol;
      const bool in_est = std::abs(estimated.K(r, c)) > zero_tol;
      if (in_truth) {
        ++true_edges;
        if (in_est) ++hits;
      } else if (in_est) {
        ++false_edges;
      }
    }
  }
  const long pairs = static_cast<long>(m) * (m - 1);
  require(true_edges > 0 && true_edges < pairs, Err::DegenerateTruth,
          "truth needs at least one edge and one non-edge");
  TprFpr out;
  out.tpr = static_cast<double>(hits) / static_cast<double>(true_edges);
  out.fpr = static_cast<double>(false_edges) / static_cast<double>(pairs - true_edges);
  return out;
}

RocCurve roc_auc(const FitPath& path, const ParameterSet& truth, double zero_tol) {
  RocCurve curve;
  for (const FitResult& fit : path.fits) {
    const TprFpr p = tpr_fpr(fit.params, truth, zero_tol);
    curve.path_points.emplace_back(p.fpr, p.tpr);
  }
  std::vector<std::pair<double, double>> pts = curve.path_points;
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  // staircase tie handling: keep the best tpr at each fpr
  for (const auto& p : pts) {
    if (!curve.points.empty() && curve.points.back().first == p.first) {
      curve.points.back().second = std::max(curve.points.back().second, p.second);
    } else {
      curve.points.push_back(p);
    }
  }
  double auc = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [f0, t0] = curve.points[i - 1];
    const auto& [f1, t1] = curve.points[i];
    auc += (f1 - f0) * 0.5 * (t0 + t1);
  }
  curve.auc = auc;
  return curve;
}

NormErrors norm_errors(const ParameterSet& estimated, const ParameterSet& truth) {
  require(estimated.m() == truth.m(), Err::DimensionMismatch, "dimension mismatch");
  const Eigen::MatrixXd diff = estimated.K - truth.K;
  NormErrors out;
  out.max = diff.cwiseAbs().maxCoeff();
  out.frobenius = diff.norm();
  out.spectral = diff.jacobiSvd().singularValues()[0];
  const double tmax = truth.K.cwiseAbs().maxCoeff();
  const double tfro = truth.K.norm();
  const double tspec = truth.K.jacobiSvd().singularValues()[0];
  out.max_rel = tmax > 0.0 ? out.max / tmax : std::numeric_limits<double>::quiet_NaN();
  out.frobenius_rel =
      tfro > 0.0 ? out.frobenius / tfro : std::numeric_limits<double>::quiet_NaN();
  out.spectral_rel =
      tspec > 0.0 ? out.spectral / tspec : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double DeltaPolicy::resolve(int n, int m) const {
  if (value) {
    require(*value >= 1.0, Err::DeltaBelowOne, "delta must be >= 1");
    return *value;
  }
  return diagonal_multiplier_bound(n, m, tau);
}

namespace {

// canonical order: rows sorted lexicographically, so fold membership and
// within-fold assembly order are functions of sample values, not file order
bool row_less(const Dataset& data, int a, int b) {
  for (int j = 0; j < data.m(); ++j) {
    if (data.x(a, j) != data.x(b, j)) return data.x(a, j) < data.x(b, j);
  }
  return false;
}

std::vector<int> canonical_order(const Dataset& data) {
  std::vector<int> idx(static_cast<std::size_t>(data.n()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return row_less(data, a, b); });
  return idx;
}

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.x.resize(static_cast<int>(rows.size()), data.m());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<int>(i)) = data.x.row(rows[i]);
  }
  out.labels = data.labels;
  return out;
}

QuadraticScoreLoss build_loss(const Dataset& data, const ModelSpec& spec,
                              const WeightSpec& weights, const std::vector<int>& J,
                              double delta, const AssembleOptions& aopts) {
  QuadraticScoreLoss loss = assemble(data, spec, weights, J, aopts);
  if (spec.mode == Mode::am1) loss = transform_am1(loss);
  return apply_diagonal_multiplier(std::move(loss), delta);
}

}  // namespace

CrossValResult cross_validate_at(const Dataset& data, const ModelSpec& spec,
                                 const WeightSpec& weights, const std::vector<int>& J,
                                 const std::vector<double>& lambdas, int folds,
                                 std::uint64_t seed, const SolverOptions& solver,
                                 const DeltaPolicy& delta, int threads) {
  const int n = data.n();
  require(folds >= 2, Err::TooFewSamples, "need at least 2 folds");
  require(n >= folds, Err::TooFewSamples, "need n >= folds");
  const int nl = static_cast<int>(lambdas.size());

  // work on the canonically ordered copy so the result is a function of the
  // sample multiset, not of row order
  const Dataset canon = subset_rows(data, canonical_order(data));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x6f6c64u));
  rng.shuffle(order);
  std::vector<std::vector<int>> fold_rows(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < order.size(); ++i) {
    fold_rows[i % static_cast<std::size_t>(folds)].push_back(order[i]);
  }
  // keep within-fold assembly order canonical as well
  for (auto& rows : fold_rows) std::sort(rows.begin(), rows.end());

  CrossValResult res;
  res.lambdas = lambdas;
  res.fold_scores.setZero(folds, nl);

  parallel_for(folds, threads, [&](int f) {
    std::vector<int> train_rows;
    for (int g = 0; g < folds; ++g) {
      if (g == f) continue;
      train_rows.insert(train_rows.end(), fold_rows[static_cast<std::size_t>(g)].begin(),
                        fold_rows[static_cast<std::size_t>(g)].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    const Dataset train = subset_rows(canon, train_rows);
    const Dataset test = subset_rows(canon, fold_rows[static_cast<std::size_t>(f)]);

    const double dtrain = delta.resolve(train.n(), train.m());
    const QuadraticScoreLoss train_loss =
        build_loss(train, spec, weights, J, dtrain, AssembleOptions{});

    // held-out loss keeps the training truncation and carries no multiplier
    AssembleOptions test_opts;
    test_opts.C_override = train_loss.resolved_C;
    const QuadraticScoreLoss test_loss =
        build_loss(test, spec, weights, J, 1.0, test_opts);
    const ReducedProblem test_red = reduce(test_loss, solver);

    const FitPath path = fit_path_at(train_loss, solver, lambdas);
    for (int k = 0; k < nl; ++k) {
      const Eigen::VectorXd& theta = path.fits[static_cast<std::size_t>(k)].theta;
      res.fold_scores(f, k) = 0.5 * test_red.A.quad(theta) - test_red.b.dot(theta);
    }
  });

  res.mean_scores.assign(static_cast<std::size_t>(nl), 0.0);
  for (int k = 0; k < nl; ++k) {
    res.mean_scores[static_cast<std::size_t>(k)] = res.fold_scores.col(k).mean();
  }
  int best = 0;
  for (int k = 1; k < nl; ++k) {
    // strict comparison: ties keep the earlier (larger) lambda
    if (res.mean_scores[static_cast<std::size_t>(k)] <
        res.mean_scores[static_cast<std::size_t>(best)]) {
      best = k;
    }
  }
  res.index_star = best;
  res.lambda_star = lambdas[static_cast<std::size_t>(best)];
  return res;
}

CrossValResult cross_validate(const Dataset& data, const ModelSpec& spec,
                              const WeightSpec& weights, const std::vector<int>& J,
                              const PathGrid& grid, int folds, std::uint64_t seed,
                              const SolverOptions& solver, const DeltaPolicy& delta,
                              int threads) {
  const double dfull = delta.resolve(data.n(), data.m());
  // the grid anchor shares the canonical row order used by the folds
  const Dataset canon = subset_rows(data, canonical_order(data));
  const QuadraticScoreLoss full =
      build_loss(canon, spec, weights, J, dfull, AssembleOptions{});
  const double lmax = lambda_max(full, solver);
  std::vector<double> lambdas(static_cast<std::size_t>(grid.n_lambda));
  for (int k = 0; k < grid.n_lambda; ++k) {
    const double t = grid.n_lambda == 1
                         ? 0.0
                         : static_cast<double>(k) / static_cast<double>(grid.n_lambda - 1);
    lambdas[static_cast<std::size_t>(k)] = lmax * std::pow(grid.ratio, t);
  }
  return cross_validate_at(data, spec, weights, J, lambdas, folds, seed, solver, delta,
                           threads);
}

}  // namespace simscore
