#include "simscore/assembly.hpp"

#include <cmath>
#include <cstring>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace simscore {

ParamLayout ParamLayout::full(int m, Mode mode) {
  ParamLayout l;
  l.m = m;
  l.mode = mode;
  l.has_eta = mode != Mode::centered;
  l.am1_reduced = false;
  return l;
}

ParamLayout ParamLayout::reduced() const {
  ParamLayout l = *this;
  l.am1_reduced = true;
  return l;
}

QuadraticTerm QuadraticTerm::zero_dense(int dim) {
  QuadraticTerm t;
  t.dense_ = true;
  t.d_ = Eigen::MatrixXd::Zero(dim, dim);
  return t;
}

QuadraticTerm QuadraticTerm::from_dense(Eigen::MatrixXd g) {
  QuadraticTerm t;
  t.dense_ = true;
  t.d_ = std::move(g);
  return t;
}

QuadraticTerm QuadraticTerm::from_sparse(Eigen::SparseMatrix<double> g) {
  QuadraticTerm t;
  t.dense_ = false;
  t.s_ = std::move(g);
  t.s_.makeCompressed();
  return t;
}

int QuadraticTerm::dim() const {
  return dense_ ? static_cast<int>(d_.rows()) : static_cast<int>(s_.rows());
}

Eigen::MatrixXd QuadraticTerm::to_dense() const {
  return dense_ ? d_ : Eigen::MatrixXd(s_);
}

Eigen::VectorXd QuadraticTerm::diagonal() const {
  if (dense_) return d_.diagonal();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(s_.rows());
  for (int k = 0; k < s_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(s_, k); it; ++it) {
      if (it.row() == it.col()) diag[it.row()] = it.value();
    }
  }
  return diag;
}

Eigen::VectorXd QuadraticTerm::product(const Eigen::VectorXd& v) const {
  return dense_ ? Eigen::VectorXd(d_ * v) : Eigen::VectorXd(s_ * v);
}

double QuadraticTerm::quad(const Eigen::VectorXd& v) const { return v.dot(product(v)); }

void QuadraticTerm::add_col_multiple(Eigen::VectorXd& q, int t, double coeff) const {
  if (dense_) {
    q.noalias() += coeff * d_.col(t);
    return;
  }
  for (Eigen::SparseMatrix<double>::InnerIterator it(s_, t); it; ++it) {
    q[it.row()] += coeff * it.value();
  }
}

double QuadraticTerm::coeff(int r, int c) const {
  return dense_ ? d_(r, c) : s_.coeff(r, c);
}

void QuadraticTerm::scale_diagonal(const Eigen::VectorXd& factors) {
  require(factors.size() == dim(), Err::DimensionMismatch, "diagonal factor size mismatch");
  if (dense_) {
    d_.diagonal().array() *= factors.array();
    return;
  }
  for (int k = 0; k < s_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(s_, k); it; ++it) {
      if (it.row() == it.col()) it.valueRef() *= factors[it.row()];
    }
  }
}

QuadraticTerm QuadraticTerm::congruence(const Eigen::SparseMatrix<double>& a) const {
  if (dense_) {
    Eigen::MatrixXd tmp = a * d_;                    // (new x old)
    return from_dense(Eigen::MatrixXd(tmp * a.transpose()));
  }
  Eigen::SparseMatrix<double> out = a * s_ * a.transpose();
  return from_sparse(std::move(out));
}

double QuadraticTerm::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::VectorXd QuadraticScoreLoss::delta_factors() const {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(dim(), delta);
  if (layout.am1_reduced) {
    // the multiplier acts on the K block of the transformed matrix only
    for (int j = 0; j < layout.m && layout.has_eta; ++j) f[layout.eta_slot(j)] = 1.0;
  }
  return f;
}

QuadraticTerm QuadraticScoreLoss::effective_gamma() const {
  QuadraticTerm g = gamma;
  if (delta != 1.0) g.scale_diagonal(delta_factors());
  return g;
}

std::uint64_t QuadraticScoreLoss::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t bytes) {
    const unsigned char* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int d = dim();
  mix(&d, sizeof(d));
  mix(&n, sizeof(n));
  mix(&delta, sizeof(delta));
  mix(&spec.a, sizeof(spec.a));
  mix(&spec.b, sizeof(spec.b));
  const int mode = static_cast<int>(spec.mode);
  mix(&mode, sizeof(mode));
  for (int j : removed) mix(&j, sizeof(j));
  mix(g.data(), sizeof(double) * static_cast<std::size_t>(g.size()));
  const Eigen::VectorXd diag = gamma.diagonal();
  mix(diag.data(), sizeof(double) * static_cast<std::size_t>(diag.size()));
  mix(alpha.data(), sizeof(double) * static_cast<std::size_t>(alpha.size()));
  return h;
}

namespace {

// min(xj, xd, c)^alpha * xj^pj * xd^pd with exponents combined on the branch
// that realizes the minimum, so boundary zeros cancel before multiplying.
double hpow(double xj, double xd, double c, double alpha, double pj, double pd) {
  double out;
  if (alpha == 0.0) {
    out = 1.0;
  } else if (xj <= xd && xj <= c) {
    return std::pow(xj, alpha + pj) * (pd == 0.0 ? 1.0 : std::pow(xd, pd));
  } else if (xd <= c) {
    return std::pow(xd, alpha + pd) * (pj == 0.0 ? 1.0 : std::pow(xj, pj));
  } else {
    out = std::pow(c, alpha);
  }
  if (pj != 0.0) out *= std::pow(xj, pj);
  if (pd != 0.0) out *= std::pow(xd, pd);
  return out;
}

// (d/dxj) h(phi) * xj^pj * xd^pd; zero at ties and when the truncation binds
double dhpow(double xj, double xd, double c, double alpha, double pj, double pd) {
  if (alpha == 0.0) return 0.0;
  if (xj < xd && xj < c) {
    return alpha * std::pow(xj, alpha - 1.0 + pj) * (pd == 0.0 ? 1.0 : std::pow(xd, pd));
  }
  if (xd < xj && xd < c) {
    return -alpha * std::pow(xd, alpha - 1.0 + pd) * (pj == 0.0 ? 1.0 : std::pow(xj, pj));
  }
  return 0.0;
}

Eigen::VectorXd power_or_log_vec(const Eigen::VectorXd& x, double e) {
  if (e == 0.0) return x.array().log();
  return x.array().pow(e);
}

void check_data_for_spec(const Dataset& data, const ModelSpec& spec) {
  require(data.n() >= 1 && data.m() >= 2, Err::DimensionMismatch,
          "dataset must be n >= 1, m >= 2");
  if (spec.log_scale()) {
    require(data.x.minCoeff() > 0.0, Err::DomainError,
            "a = 0 or b = 0 models need strictly positive data");
  } else {
    require(data.x.minCoeff() >= 0.0, Err::DomainError, "data must be nonnegative");
  }
}

void check_J(const std::vector<int>& J, int m) {
  require(!J.empty(), Err::EmptyJ, "removed-coordinate set J must be nonempty");
  for (std::size_t i = 0; i < J.size(); ++i) {
    require(J[i] >= 0 && J[i] < m, Err::IndexOutOfRange, "J entry out of range");
    for (std::size_t k = i + 1; k < J.size(); ++k) {
      require(J[i] != J[k], Err::IndexOutOfRange, "J entries must be distinct");
    }
  }
}

}  // namespace

QuadraticScoreLoss assemble(const Dataset& data, const ModelSpec& spec,
                            const WeightSpec& weights, const std::vector<int>& J,
                            const AssembleOptions& opts) {
  const int m = data.m();
  const int n = data.n();
  check_data_for_spec(data, spec);
  check_J(J, m);
  weights.validate(m);
  {
    const HExponentReport rep = validate_h_exponents(spec, weights);
    require(rep.pass || !rep.known, Err::InvalidWeights,
            "weight exponents fail the score-matching assumptions: " + rep.binding);
  }

  const ParamLayout layout = ParamLayout::full(m, spec.mode);
  const int dim = layout.dim();
  const bool centered = !layout.has_eta;
  const int u = centered ? m : m + 1;  // per-column coefficient block size
  const bool dense = !opts.force_sparse && dim <= QuadraticTerm::kDenseDimLimit;

  const double a = spec.a;
  const double b = spec.b;
  const double ca = a == 0.0 ? 1.0 : a;
  const double ca1 = a == 0.0 ? -1.0 : a - 1.0;
  const double cb1 = b == 0.0 ? -1.0 : b - 1.0;
  // per-removed-coordinate scale; division by |J| happens at the end so the
  // multi-J result is bitwise the mean of the single-J assemblies
  const double scale = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd gamma_dense;
  std::vector<Eigen::Triplet<double>> trips;
  if (dense) {
    gamma_dense = Eigen::MatrixXd::Zero(dim, dim);
  } else {
    trips.reserve(static_cast<std::size_t>(J.size()) * 2u * static_cast<std::size_t>(m) *
                  static_cast<std::size_t>(u) * static_cast<std::size_t>(u));
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd g_d = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd resolved_C(m, static_cast<int>(J.size()));

  // per-dropped-coordinate block buffers
  std::vector<Eigen::MatrixXd> diag_blk(static_cast<std::size_t>(m));
  std::vector<Eigen::MatrixXd> cross_blk(static_cast<std::size_t>(m));
  Eigen::MatrixXd corner_blk(u, u);
  Eigen::VectorXd vj(u), vd(u);

  if (opts.C_override) {
    require(opts.C_override->rows() == m &&
                opts.C_override->cols() == static_cast<int>(J.size()),
            Err::DimensionMismatch, "C_override must be m x |J|");
  }
  for (std::size_t jd = 0; jd < J.size(); ++jd) {
    const int d = J[jd];
    const Eigen::VectorXd cvec = opts.C_override
                                     ? opts.C_override->col(static_cast<int>(jd))
                                     : weights.truncation_for(data, d);
    resolved_C.col(static_cast<int>(jd)) = cvec;

    for (int j = 0; j < m; ++j) {
      if (j == d) continue;
      diag_blk[static_cast<std::size_t>(j)].setZero(u, u);
      cross_blk[static_cast<std::size_t>(j)].setZero(u, u);
    }
    corner_blk.setZero(u, u);
    g_d.setZero();

    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd x = data.x.row(i).transpose();
      const Eigen::VectorXd xa = power_or_log_vec(x, a);
      const double xd = x[d];

      for (int j = 0; j < m; ++j) {
        if (j == d) continue;
        const double xj = x[j];
        const double aj = weights.alpha[j];
        const double cj = cvec[j];
        const double ah = 0.5 * aj;  // exponent of the square-root weight

        // square-root-weighted coefficient vector of d_j log p:
        // K column j part, then eta_j, then K column d part, then eta_d
        const double sj = hpow(xj, xd, cj, ah, a - 1.0, 0.0);
        const double sd = hpow(xj, xd, cj, ah, 0.0, a - 1.0);
        for (int r = 0; r < m; ++r) {
          vj[r] = -sj * xa[r];
          vd[r] = sd * xa[r];
        }
        if (a != 0.0) {
          // combine exponents where the bases coincide with x_j or x_d
          vj[j] = -hpow(xj, xd, cj, ah, 2.0 * a - 1.0, 0.0);
          vj[d] = -hpow(xj, xd, cj, ah, a - 1.0, a);
          vd[j] = hpow(xj, xd, cj, ah, a, a - 1.0);
          vd[d] = hpow(xj, xd, cj, ah, 0.0, 2.0 * a - 1.0);
        }
        if (!centered) {
          vj[m] = hpow(xj, xd, cj, ah, b - 1.0, 0.0);
          vd[m] = -hpow(xj, xd, cj, ah, 0.0, b - 1.0);
        }

        auto& Dj = diag_blk[static_cast<std::size_t>(j)];
        auto& Xj = cross_blk[static_cast<std::size_t>(j)];
        Dj.noalias() += vj * vj.transpose();
        Xj.noalias() += vj * vd.transpose();
        corner_blk.noalias() += vd * vd.transpose();

        // g blocks (a = 0 keeps the plain form; the data are then interior)
        const double s1j = dhpow(xj, xd, cj, aj, a - 1.0, 0.0) +
                           ca1 * hpow(xj, xd, cj, aj, a - 2.0, 0.0);
        const double s1d = -dhpow(xj, xd, cj, aj, 0.0, a - 1.0) +
                           ca1 * hpow(xj, xd, cj, aj, 0.0, a - 2.0);
        for (int r = 0; r < m; ++r) {
          g_d[layout.k_slot(r, j)] += s1j * xa[r];
          g_d[layout.k_slot(r, d)] += s1d * xa[r];
        }
        if (a != 0.0) {
          g_d[layout.k_slot(j, j)] += dhpow(xj, xd, cj, aj, 2.0 * a - 1.0, 0.0) +
                                    ca1 * hpow(xj, xd, cj, aj, 2.0 * a - 2.0, 0.0) -
                                    s1j * xa[j];
          g_d[layout.k_slot(d, j)] += dhpow(xj, xd, cj, aj, a - 1.0, a) +
                                    ca1 * hpow(xj, xd, cj, aj, a - 2.0, a) - s1j * xa[d];
          g_d[layout.k_slot(j, d)] += -dhpow(xj, xd, cj, aj, a, a - 1.0) +
                                    ca1 * hpow(xj, xd, cj, aj, a, a - 2.0) - s1d * xa[j];
          g_d[layout.k_slot(d, d)] += -dhpow(xj, xd, cj, aj, 0.0, 2.0 * a - 1.0) +
                                    ca1 * hpow(xj, xd, cj, aj, 0.0, 2.0 * a - 2.0) -
                                    s1d * xa[d];
        }
        g_d[layout.k_slot(j, j)] += ca * hpow(xj, xd, cj, aj, 2.0 * a - 2.0, 0.0);
        g_d[layout.k_slot(d, d)] += ca * hpow(xj, xd, cj, aj, 0.0, 2.0 * a - 2.0);
        const double cross = ca * hpow(xj, xd, cj, aj, a - 1.0, a - 1.0);
        g_d[layout.k_slot(d, j)] -= cross;
        g_d[layout.k_slot(j, d)] -= cross;

        if (!centered) {
          g_d[layout.eta_slot(j)] += -dhpow(xj, xd, cj, aj, b - 1.0, 0.0) -
                                   cb1 * hpow(xj, xd, cj, aj, b - 2.0, 0.0);
          g_d[layout.eta_slot(d)] += dhpow(xj, xd, cj, aj, 0.0, b - 1.0) -
                                   cb1 * hpow(xj, xd, cj, aj, 0.0, b - 2.0);
        }
      }
    }

    // scatter buffers into the slot-space matrix
    auto slot_of = [&](int colk, int r) {
      return r < m ? layout.k_slot(r, colk) : layout.eta_slot(colk);
    };
    auto emit = [&](const Eigen::MatrixXd& blk, int colr, int colc, double sgn) {
      for (int r = 0; r < u; ++r) {
        const int sr = slot_of(colr, r);
        for (int c = 0; c < u; ++c) {
          const double v = sgn * scale * blk(r, c);
          if (v == 0.0) continue;
          const int sc = slot_of(colc, c);
          if (dense) {
            gamma_dense(sr, sc) += v;
          } else {
            trips.emplace_back(sr, sc, v);
          }
        }
      }
    };
    for (int j = 0; j < m; ++j) {
      if (j == d) continue;
      emit(diag_blk[static_cast<std::size_t>(j)], j, j, 1.0);
      emit(cross_blk[static_cast<std::size_t>(j)], j, d, 1.0);
      emit(cross_blk[static_cast<std::size_t>(j)].transpose(), d, j, 1.0);
    }
    emit(corner_blk, d, d, 1.0);
    g += g_d * scale;
  }

  const double nj = static_cast<double>(J.size());
  QuadraticScoreLoss loss;
  if (dense) {
    gamma_dense /= nj;
    loss.gamma = QuadraticTerm::from_dense(std::move(gamma_dense));
  } else {
    for (auto& t : trips) t = {t.row(), t.col(), t.value() / nj};
    Eigen::SparseMatrix<double> sp(dim, dim);
    sp.setFromTriplets(trips.begin(), trips.end());
    loss.gamma = QuadraticTerm::from_sparse(std::move(sp));
  }
  loss.g = g / nj;
  loss.layout = layout;
  loss.spec = spec;
  loss.alpha = weights.alpha;
  loss.resolved_C = resolved_C;
  loss.removed = J;
  loss.n = n;
  loss.delta = 1.0;
  return loss;
}

double empirical_loss_direct(const Dataset& data, const ModelSpec& spec,
                             const WeightSpec& weights, const ParameterSet& params,
                             const std::vector<int>& J) {
  const int m = data.m();
  const int n = data.n();
  check_data_for_spec(data, spec);
  check_J(J, m);
  weights.validate(m);
  require(params.m() == m, Err::DimensionMismatch, "parameter dimension mismatch");

  const double a = spec.a;
  const double b = spec.b;
  const double ca = a == 0.0 ? 1.0 : a;
  const double ca1 = a == 0.0 ? -1.0 : a - 1.0;
  const double cb1 = b == 0.0 ? -1.0 : b - 1.0;

  double total = 0.0;
  for (int d : J) {
    const Eigen::VectorXd cvec = weights.truncation_for(data, d);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd x = data.x.row(i).transpose();
      const Eigen::VectorXd xa = power_or_log_vec(x, a);
      const Eigen::VectorXd kxa = params.K.transpose() * xa;  // kxa[c] = kappa_{,c}' x^a
      const double xd = x[d];

      for (int j = 0; j < m; ++j) {
        if (j == d) continue;
        const double xj = x[j];
        const HPhi hp = hphi_and_deriv(x, j, weights.alpha[j], cvec[j], d);

        const double q = -kxa[j] * std::pow(xj, a - 1.0) + kxa[d] * std::pow(xd, a - 1.0) +
                         params.eta[j] * std::pow(xj, b - 1.0) -
                         params.eta[d] * std::pow(xd, b - 1.0);
        const double qjj =
            -ca1 * (kxa[j] * std::pow(xj, a - 2.0) + kxa[d] * std::pow(xd, a - 2.0)) -
            ca * (params.K(j, j) * std::pow(xj, 2.0 * a - 2.0) +
                  params.K(d, d) * std::pow(xd, 2.0 * a - 2.0)) +
            ca * (params.K(j, d) + params.K(d, j)) * std::pow(xj, a - 1.0) *
                std::pow(xd, a - 1.0) +
            cb1 * (params.eta[j] * std::pow(xj, b - 2.0) +
                   params.eta[d] * std::pow(xd, b - 2.0));

        acc += 0.5 * hp.value * q * q + hp.d_value * q + hp.value * qjj;
      }
    }
    total += acc / static_cast<double>(n);
  }
  return total / static_cast<double>(J.size());
}

QuadraticScoreLoss apply_diagonal_multiplier(QuadraticScoreLoss loss, double delta) {
  require(delta >= 1.0, Err::DeltaBelowOne, "diagonal multiplier must be >= 1");
  loss.delta = delta;
  return loss;
}

double diagonal_multiplier_bound(int n, int m, double tau) {
  require(n >= 1, Err::NonpositiveN, "n must be positive");
  require(m >= 1, Err::DomainError, "m must be positive");
  require(tau >= 0.0, Err::DomainError, "tau must be >= 0");
  return 1.0 + std::sqrt((tau * std::log(static_cast<double>(m)) + std::log(4.0)) /
                         (2.0 * static_cast<double>(n)));
}

Eigen::MatrixXd build_C_matrix(int j, int m) {
  require(m >= 2, Err::IndexOutOfRange, "m must be >= 2");
  require(j >= 0 && j < m, Err::IndexOutOfRange, "column index out of range");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m - 1, m);
  for (int r = 0; r < m - 1; ++r) {
    c(r, r < j ? r : r + 1) = 1.0;
    c(r, j) = -1.0;
  }
  return c;
}

QuadraticScoreLoss transform_am1(const QuadraticScoreLoss& loss) {
  require(loss.spec.mode == Mode::am1, Err::WrongMode,
          "A^{m-1} transform only applies in am1 mode");
  require(!loss.layout.am1_reduced, Err::WrongMode, "loss already transformed");
  require(loss.delta == 1.0, Err::WrongMode,
          "apply the diagonal multiplier after the transform");
  const int m = loss.layout.m;
  const ParamLayout red = loss.layout.reduced();

  Eigen::SparseMatrix<double> t(red.dim(), loss.dim());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(2 * m * (m - 1) + m));
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < m - 1; ++r) {
      const int orig_row = r < c ? r : r + 1;
      trips.emplace_back(c * (m - 1) + r, loss.layout.k_slot(orig_row, c), 1.0);
      trips.emplace_back(c * (m - 1) + r, loss.layout.k_slot(c, c), -1.0);
    }
  }
  if (red.has_eta) {
    for (int j = 0; j < m; ++j) {
      trips.emplace_back(red.eta_slot(j), loss.layout.eta_slot(j), 1.0);
    }
  }
  t.setFromTriplets(trips.begin(), trips.end());

  QuadraticScoreLoss out = loss;
  out.gamma = loss.gamma.congruence(t);
  out.g = t * loss.g;
  out.layout = red;
  return out;
}

Eigen::VectorXd pack_parameters(const ParamLayout& layout, const ParameterSet& params) {
  require(params.m() == layout.m, Err::DimensionMismatch, "parameter dimension mismatch");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(layout.dim());
  for (int c = 0; c < layout.m; ++c) {
    for (int r = 0; r < layout.m; ++r) {
      if (layout.am1_reduced && r == c) continue;
      theta[layout.k_slot(r, c)] = params.K(r, c);
    }
  }
  if (layout.has_eta) {
    for (int j = 0; j < layout.m; ++j) theta[layout.eta_slot(j)] = params.eta[j];
  }
  return theta;
}

ParameterSet unpack_parameters(const ParamLayout& layout, const Eigen::VectorXd& theta) {
  require(theta.size() == layout.dim(), Err::DimensionMismatch, "theta dimension mismatch");
  const int m = layout.m;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (int c = 0; c < m; ++c) {
    double col_sum = 0.0;
    for (int r = 0; r < m; ++r) {
      if (layout.am1_reduced && r == c) continue;
      K(r, c) = theta[layout.k_slot(r, c)];
      col_sum += K(r, c);
    }
    if (layout.am1_reduced) K(c, c) = -col_sum;
  }
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(m);
  if (layout.has_eta) {
    for (int j = 0; j < m; ++j) eta[j] = theta[layout.eta_slot(j)];
  }
  return ParameterSet::make(layout.mode, std::move(K), std::move(eta));
}

}  // namespace simscore
