#include "simscore/model.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace simscore {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::general: return "general";
    case Mode::symmetric: return "symmetric";
    case Mode::am1: return "am1";
    case Mode::centered: return "centered";
  }
  return "?";
}

std::optional<Mode> mode_from_string(const std::string& s) {
  if (s == "general") return Mode::general;
  if (s == "symmetric") return Mode::symmetric;
  if (s == "am1") return Mode::am1;
  if (s == "centered") return Mode::centered;
  return std::nullopt;
}

ModelSpec::ModelSpec(double a_, double b_, Mode mode_) : a(a_), b(b_), mode(mode_) {
  require(a >= 0.0 && b >= 0.0, Err::InvalidModelSpec, "exponents a, b must be >= 0");
  require(std::isfinite(a) && std::isfinite(b), Err::InvalidModelSpec,
          "exponents a, b must be finite");
  if (mode == Mode::am1) {
    require(a == 0.0 && b == 0.0, Err::InvalidModelSpec, "am1 mode requires a = b = 0");
  }
}

Composition validate_composition(const Eigen::VectorXd& raw, const ModelSpec& spec,
                                 double tol) {
  require(raw.size() >= 2, Err::DimensionMismatch, "composition needs at least 2 entries");
  for (int j = 0; j < raw.size(); ++j) {
    require(raw[j] >= 0.0, Err::NegativeEntry,
            "negative entry at position " + std::to_string(j));
    if (spec.log_scale()) {
      require(raw[j] > 0.0, Err::ZeroEntryWithLogModel,
              "zero entry at position " + std::to_string(j) +
                  " not allowed when a = 0 or b = 0");
    }
  }
  const double s = raw.sum();
  require(std::abs(s - 1.0) <= tol, Err::SumOutOfTolerance,
          "entries sum to " + std::to_string(s));
  Composition out;
  out.v = raw / s;
  return out;
}

Composition close_counts(const Eigen::VectorXd& counts, double pseudocount) {
  require(pseudocount >= 0.0, Err::DomainError, "pseudocount must be >= 0");
  for (int j = 0; j < counts.size(); ++j) {
    require(counts[j] >= 0.0, Err::NegativeEntry, "counts must be nonnegative");
  }
  const double total = counts.sum() + pseudocount * static_cast<double>(counts.size());
  require(total > 0.0, Err::AllZeroNoPseudocount,
          "all counts zero and no pseudocount given");
  Composition out;
  out.v = (counts.array() + pseudocount) / total;
  return out;
}

Dataset Dataset::from_rows(const Eigen::MatrixXd& raw, const ModelSpec& spec, double tol) {
  require(raw.rows() >= 1, Err::DimensionMismatch, "dataset needs at least one sample");
  Dataset d;
  d.x.resize(raw.rows(), raw.cols());
  for (int i = 0; i < raw.rows(); ++i) {
    d.x.row(i) = validate_composition(raw.row(i).transpose(), spec, tol).v.transpose();
  }
  return d;
}

ParameterSet ParameterSet::make(Mode mode, Eigen::MatrixXd K, Eigen::VectorXd eta) {
  const int m = static_cast<int>(K.rows());
  require(K.cols() == m, Err::DimensionMismatch, "K must be square");
  require(eta.size() == m, Err::DimensionMismatch, "eta size must match K");
  if (mode == Mode::symmetric || mode == Mode::am1) {
    require(K == K.transpose(), Err::ConstraintViolated,
            "K must be exactly symmetric in " + to_string(mode) + " mode");
  }
  if (mode == Mode::am1) {
    const double worst = (K * Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff();
    require(worst <= kRowSumZeroTol, Err::ConstraintViolated,
            "am1 mode requires K 1 = 0 (max violation " + std::to_string(worst) + ")");
  }
  if (mode == Mode::centered) {
    require(eta.isZero(0.0), Err::ConstraintViolated, "centered mode requires eta = 0");
  }
  return ParameterSet{std::move(K), std::move(eta)};
}

ParameterSet ParameterSet::zero(Mode mode, int m) {
  return make(mode, Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m));
}

namespace {

Eigen::VectorXd power_or_log(const Eigen::VectorXd& x, double e) {
  if (e == 0.0) return x.array().log();
  return x.array().pow(e);
}

// smallest/largest eigenvalues of the symmetric part
std::pair<double, double> sym_eig_range(const Eigen::MatrixXd& K) {
  const Eigen::MatrixXd s = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

bool is_pd(const Eigen::MatrixXd& K) {
  auto [lo, hi] = sym_eig_range(K);
  const double scale = std::max(1.0, std::abs(hi));
  return lo > kPsdTol * scale;
}

bool is_psd(const Eigen::MatrixXd& K) {
  auto [lo, hi] = sym_eig_range(K);
  const double scale = std::max(1.0, std::abs(hi));
  return lo >= -kPsdTol * scale;
}

bool row_sums_zero(const Eigen::MatrixXd& K) {
  const int m = static_cast<int>(K.rows());
  return (K * Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff() <= 1e-10 &&
         (K.transpose() * Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff() <= 1e-10;
}

Eigen::MatrixXd drop_row_col(const Eigen::MatrixXd& K, int k) {
  const int m = static_cast<int>(K.rows());
  Eigen::MatrixXd out(m - 1, m - 1);
  for (int r = 0, rr = 0; r < m; ++r) {
    if (r == k) continue;
    for (int c = 0, cc = 0; c < m; ++c) {
      if (c == k) continue;
      out(rr, cc) = K(r, c);
      ++cc;
    }
    ++rr;
  }
  return out;
}

}  // namespace

double log_kernel(const ModelSpec& spec, const ParameterSet& params, const Composition& x) {
  return log_kernel(spec, params, x.v);
}

double log_kernel(const ModelSpec& spec, const ParameterSet& params,
                  const Eigen::VectorXd& x) {
  require(x.size() == params.m(), Err::DimensionMismatch, "x size must match parameters");
  if (spec.log_scale()) {
    for (int j = 0; j < x.size(); ++j) {
      require(x[j] > 0.0, Err::DomainError, "log model needs strictly positive entries");
    }
  }
  const Eigen::VectorXd xa = power_or_log(x, spec.a);
  const Eigen::VectorXd xb = power_or_log(x, spec.b);
  const double inv2a = spec.a == 0.0 ? 0.5 : 0.5 / spec.a;
  const double invb = spec.b == 0.0 ? 1.0 : 1.0 / spec.b;
  return -inv2a * xa.dot(params.K * xa) + invb * params.eta.dot(xb);
}

std::string to_string(NormCondition c) {
  switch (c) {
    case NormCondition::CC1: return "CC1";
    case NormCondition::CC2: return "CC2";
    case NormCondition::CC3: return "CC3";
    case NormCondition::CC4: return "CC4";
    case NormCondition::Thm4_I: return "Thm4-I";
    case NormCondition::Thm4_II: return "Thm4-II";
    case NormCondition::Thm4_III: return "Thm4-III";
  }
  return "?";
}

ValidityReport check_normalizability(const ModelSpec& spec, const ParameterSet& params) {
  ValidityReport rep;
  const int m = params.m();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);

  auto proven = [&rep](NormCondition c, const std::string& why) {
    rep.normalizable = ValidityReport::State::proven;
    rep.condition_hit = c;
    rep.details = why;
    return rep;
  };

  if (spec.a > 0.0 && spec.b > 0.0) {
    return proven(NormCondition::CC1, "a > 0 and b > 0");
  }
  if (spec.a > 0.0 && spec.b == 0.0) {
    if ((params.eta.array() > -1.0).all()) {
      return proven(NormCondition::CC2, "a > 0, b = 0, all eta_j > -1");
    }
    rep.normalizable = ValidityReport::State::violated;
    rep.details = "a > 0, b = 0 with some eta_j <= -1: kernel is not integrable";
    return rep;
  }

  // a = 0 from here on; quadratic-form positivity over the simplex is attacked
  // through eigenvalue-checkable sufficient conditions.
  const bool symmetric = params.K == params.K.transpose();
  const Eigen::MatrixXd Ksym = 0.5 * (params.K + params.K.transpose());

  if (spec.b == 0.0) {
    if (symmetric && is_pd(Ksym)) {
      return proven(NormCondition::Thm4_I, "K symmetric positive definite");
    }
    if (row_sums_zero(params.K)) {
      const bool sub_pd = is_pd(drop_row_col(Ksym, 0));
      if (sub_pd && params.eta.dot(ones) + m >= 0.0) {
        return proven(NormCondition::Thm4_II,
                      "K 1 = 0, K_{-k,-k} positive definite, 1'eta + m >= 0");
      }
      if (is_psd(Ksym) && (params.eta.array() > -1.0).all()) {
        return proven(NormCondition::Thm4_III,
                      "K 1 = 0, K positive semi-definite, eta > -1");
      }
    }
    rep.normalizable = ValidityReport::State::unproven;
    rep.details = "no eigenvalue-checkable sufficient condition applies; "
                  "CC3 positivity over the simplex not decided";
    return rep;
  }

  // a = 0, b > 0: CC4 needs log(x)' K log(x) >= 0 on the simplex; PSD suffices.
  if (symmetric && is_psd(Ksym)) {
    return proven(NormCondition::CC4, "a = 0, b > 0, K positive semi-definite");
  }
  rep.normalizable = ValidityReport::State::unproven;
  rep.details = "CC4 nonnegativity over the simplex not decided by PSD test";
  return rep;
}

std::string to_string(NonIdentifiableCase c) {
  switch (c) {
    case NonIdentifiableCase::I_a1_b1: return "I";
    case NonIdentifiableCase::II_a1_b2: return "II";
    case NonIdentifiableCase::III_a1_eta_only: return "III";
    case NonIdentifiableCase::IV_2a_eq_b: return "IV";
  }
  return "?";
}

IdentifiabilityReport check_identifiability(double a, double b) {
  require(a >= 0.0 && b >= 0.0, Err::InvalidModelSpec, "exponents must be >= 0");
  IdentifiabilityReport rep;
  if (a == 1.0 && b == 1.0) {
    rep.identifiable = false;
    rep.exception_case = NonIdentifiableCase::I_a1_b1;
  } else if (a == 1.0 && b == 2.0) {
    rep.identifiable = false;
    rep.exception_case = NonIdentifiableCase::II_a1_b2;
  } else if (a == 1.0) {
    rep.identifiable = false;
    rep.exception_case = NonIdentifiableCase::III_a1_eta_only;
  } else if (2.0 * a == b && b > 0.0) {
    rep.identifiable = false;
    rep.exception_case = NonIdentifiableCase::IV_2a_eq_b;
  }
  return rep;
}

ParameterSet am1_from_aitchison(const Eigen::VectorXd& beta, const Eigen::MatrixXd& gamma) {
  const int m = static_cast<int>(gamma.rows());
  require(gamma.cols() == m, Err::DimensionMismatch, "gamma must be square");
  require(beta.size() == m, Err::DimensionMismatch, "beta size must match gamma");
  for (int j = 0; j < m; ++j) {
    require(gamma(j, j) == 0.0, Err::AsymmetricGamma, "gamma must have zero diagonal");
    for (int k = j + 1; k < m; ++k) {
      require(gamma(j, k) == gamma(k, j), Err::AsymmetricGamma, "gamma must be symmetric");
    }
  }
  Eigen::MatrixXd K(m, m);
  for (int j = 0; j < m; ++j) {
    double diag = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      diag += gamma(j, i);
      K(i, j) = -2.0 * gamma(i, j);
    }
    // same addends as the off-diagonal row sum, so K 1 = 0 holds exactly
    K(j, j) = 2.0 * diag;
  }
  return ParameterSet::make(Mode::am1, std::move(K),
                            beta - Eigen::VectorXd::Ones(m));
}

Eigen::VectorXd alr_transform(const Composition& x, int ref) {
  const int m = x.size();
  require(ref >= 0 && ref < m, Err::IndexOutOfRange, "reference index out of range");
  for (int j = 0; j < m; ++j) {
    require(x.v[j] > 0.0, Err::DomainError, "alr needs strictly positive entries");
  }
  Eigen::VectorXd y(m - 1);
  const double lref = std::log(x.v[ref]);
  for (int j = 0, r = 0; j < m; ++j) {
    if (j == ref) continue;
    y[r++] = std::log(x.v[j]) - lref;
  }
  return y;
}

Composition alr_inverse(const Eigen::VectorXd& y, int ref) {
  const int m = static_cast<int>(y.size()) + 1;
  require(ref >= 0 && ref < m, Err::IndexOutOfRange, "reference index out of range");
  // stabilized against large y by shifting with the running max
  double ymax = 0.0;
  for (int j = 0; j < y.size(); ++j) ymax = std::max(ymax, y[j]);
  double denom = std::exp(-ymax);
  for (int j = 0; j < y.size(); ++j) denom += std::exp(y[j] - ymax);
  Composition out;
  out.v.resize(m);
  out.v[ref] = std::exp(-ymax) / denom;
  for (int j = 0, r = 0; j < m; ++j) {
    if (j == ref) continue;
    out.v[j] = std::exp(y[r++] - ymax) / denom;
  }
  return out;
}

}  // namespace simscore
