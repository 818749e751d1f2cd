#include "simscore/sampling.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "simscore/rng.hpp"

namespace simscore {

void McmcOptions::validate() const {
  require(burn_in >= 0, Err::InvalidModelSpec, "burn_in must be >= 0");
  require(thin >= 1, Err::InvalidModelSpec, "thin must be >= 1");
  require(step_size > 0.0, Err::InvalidModelSpec, "step_size must be positive");
}

Dataset sample_dirichlet(const Eigen::VectorXd& alpha, int n, std::uint64_t seed) {
  const int m = static_cast<int>(alpha.size());
  require(m >= 2, Err::DimensionMismatch, "need at least 2 components");
  require(n >= 1, Err::DimensionMismatch, "need n >= 1");
  require((alpha.array() > 0.0).all(), Err::NonpositiveAlpha,
          "Dirichlet parameters must be positive");
  Rng rng(seed);
  Dataset d;
  d.x.resize(n, m);
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      double gj;
      do {
        gj = rng.gamma(alpha[j]);
      } while (gj <= 0.0);  // guards underflow at tiny shapes
      d.x(i, j) = gj;
      total += gj;
    }
    d.x.row(i) /= total;
  }
  return d;
}

Dataset sample_logistic_normal(const ParameterSet& params, int n, std::uint64_t seed) {
  const int m = params.m();
  require(n >= 1, Err::DimensionMismatch, "need n >= 1");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  require((params.K - params.K.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
          Err::ConstraintViolated, "K must be symmetric");
  require((params.K * ones).cwiseAbs().maxCoeff() <= 1e-10, Err::ConstraintViolated,
          "K 1 = 0 required");
  require(std::abs(params.eta.dot(ones) + m) <= 1e-10, Err::ConstraintViolated,
          "1'eta = -m required for the additive logistic normal");

  const Eigen::MatrixXd km = params.K.topLeftCorner(m - 1, m - 1);
  Eigen::LLT<Eigen::MatrixXd> llt(km);
  require(llt.info() == Eigen::Success, Err::NotPositiveDefinite,
          "K_{-m,-m} must be positive definite");
  // the alr image of the kernel exp(-1/2 log x' K log x + eta' log x) has
  // linear term (eta_{-m} + 1)' y once the Jacobian prod x_j is absorbed
  const Eigen::VectorXd mu =
      llt.solve(Eigen::VectorXd(params.eta.head(m - 1).array() + 1.0));

  Rng rng(seed);
  Dataset d;
  d.x.resize(n, m);
  Eigen::VectorXd z(m - 1);
  const Eigen::MatrixXd lT = llt.matrixU();  // K_{-m,-m} = L L', solve L' y = z
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m - 1; ++j) z[j] = rng.normal();
    const Eigen::VectorXd y = mu + lT.triangularView<Eigen::Upper>().solve(z);
    d.x.row(i) = alr_inverse(y, m - 1).v.transpose();
  }
  return d;
}

namespace {

// log(x(y)) with x_m profiled out; y lives in R^{m-1}, reference m-1 (0-based)
Eigen::VectorXd log_x_of_y(const Eigen::VectorXd& y) {
  const int m = static_cast<int>(y.size()) + 1;
  double peak = 0.0;
  for (int j = 0; j < y.size(); ++j) peak = std::max(peak, y[j]);
  double s = std::exp(-peak);
  for (int j = 0; j < y.size(); ++j) s += std::exp(y[j] - peak);
  const double lse = peak + std::log(s);
  Eigen::VectorXd lx(m);
  lx.head(m - 1) = y.array() - lse;
  lx[m - 1] = -lse;
  return lx;
}

double kernel_on_logx(const ModelSpec& spec, const ParameterSet& params,
                      const Eigen::VectorXd& lx) {
  const Eigen::VectorXd xa =
      spec.a == 0.0 ? lx : Eigen::VectorXd((spec.a * lx.array()).exp());
  const Eigen::VectorXd xb =
      spec.b == 0.0 ? lx : Eigen::VectorXd((spec.b * lx.array()).exp());
  const double inv2a = spec.a == 0.0 ? 0.5 : 0.5 / spec.a;
  const double invb = spec.b == 0.0 ? 1.0 : 1.0 / spec.b;
  return -inv2a * xa.dot(params.K * xa) + invb * params.eta.dot(xb);
}

}  // namespace

double alr_log_target(const ModelSpec& spec, const ParameterSet& params,
                      const Eigen::VectorXd& y) {
  const Eigen::VectorXd lx = log_x_of_y(y);
  return kernel_on_logx(spec, params, lx) + lx.sum();
}

Dataset sample_ab_mcmc(const ModelSpec& spec, const ParameterSet& params, int n,
                       const McmcOptions& opts, McmcDiagnostics* diag) {
  opts.validate();
  require(n >= 1, Err::DimensionMismatch, "need n >= 1");
  const ValidityReport validity = check_normalizability(spec, params);
  require(validity.normalizable == ValidityReport::State::proven, Err::NotNormalizable,
          "refusing to sample: normalizability not proven (" + validity.details + ")");

  const int m = params.m();
  const int k = m - 1;
  Rng rng(opts.seed);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
  double lt = alr_log_target(spec, params, y);
  Eigen::VectorXd step = Eigen::VectorXd::Constant(k, opts.step_size);

  const int adapt_batch = 50;
  Eigen::VectorXi batch_accepts = Eigen::VectorXi::Zero(k);
  long post_accepts = 0;
  long post_proposals = 0;

  auto sweep = [&](bool adapting) {
    for (int j = 0; j < k; ++j) {
      const double old = y[j];
      y[j] = old + step[j] * rng.normal();
      const double lt_new = alr_log_target(spec, params, y);
      const bool accept = std::log(rng.uniform_pos()) < lt_new - lt;
      if (accept) {
        lt = lt_new;
        if (adapting) batch_accepts[j] += 1;
        if (!adapting) ++post_accepts;
      } else {
        y[j] = old;
      }
      if (!adapting) ++post_proposals;
    }
  };

  for (int it = 0; it < opts.burn_in; ++it) {
    sweep(true);
    if ((it + 1) % adapt_batch == 0) {
      for (int j = 0; j < k; ++j) {
        const double rate =
            static_cast<double>(batch_accepts[j]) / static_cast<double>(adapt_batch);
        step[j] *= std::exp(0.5 * (rate - 0.3));
      }
      batch_accepts.setZero();
    }
  }
  // step sizes frozen from here on to preserve detailed balance

  Dataset d;
  d.x.resize(n, m);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < opts.thin; ++t) sweep(false);
    d.x.row(i) = alr_inverse(y, m - 1).v.transpose();
  }

  const double acc_rate = post_proposals == 0
                              ? 0.0
                              : static_cast<double>(post_accepts) /
                                    static_cast<double>(post_proposals);
  if (diag) {
    diag->acceptance_rate = acc_rate;
    diag->step_sizes = step;
  }
  require(acc_rate >= 0.01, Err::ZeroAcceptance,
          "post-adaptation acceptance rate below 1%");
  return d;
}

ParameterSet banded_K(int m, int s) {
  require(m >= 2, Err::DimensionMismatch, "m must be >= 2");
  require(s >= 0, Err::DomainError, "bandwidth must be >= 0");
  require(s < m, Err::BandwidthTooLarge, "bandwidth must satisfy s < m");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    double diag = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const int lag = std::abs(i - j);
      if (lag <= s) {
        const double w = 1.0 - static_cast<double>(lag) / static_cast<double>(s + 1);
        K(i, j) = -w;
        diag += w;
      }
    }
    K(i, i) = diag;
  }
  return ParameterSet::make(Mode::am1, std::move(K), Eigen::VectorXd::Zero(m));
}

}  // namespace simscore
