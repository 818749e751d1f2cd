#include "simscore/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "simscore/rng.hpp"

namespace simscore {

std::uint64_t stable_hash64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

WeightSpec EstimateConfig::weights(int m) const {
  require(pi.has_value() != C_scalar.has_value(), Err::InvalidWeights,
          "choose either a quantile pi or an explicit truncation constant");
  if (pi) return WeightSpec::power(m, h_exponent, *pi);
  return WeightSpec::with_constant(m, h_exponent, *C_scalar);
}

std::vector<int> EstimateConfig::resolve_J(int m) const {
  if (!J.empty()) {
    for (int j : J) {
      require(j >= 0 && j < m, Err::IndexOutOfRange, "J entry out of range");
    }
    return J;
  }
  require(j_count >= 1 && j_count <= m, Err::IndexOutOfRange,
          "j_count must be in [1, m]");
  if (j_count == 1) return {m - 1};  // default: drop the last coordinate
  std::vector<int> all(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) all[static_cast<std::size_t>(j)] = j;
  Rng rng(derive_seed(seed, 0x4a5e7ddULL));
  rng.shuffle(all);
  std::vector<int> out(all.begin(), all.begin() + j_count);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string EstimateConfig::canonical_text() const {
  std::string s;
  s += "a=" + num(spec.a) + ";b=" + num(spec.b) + ";mode=" + to_string(spec.mode);
  s += ";h=" + num(h_exponent);
  if (pi) s += ";pi=" + num(*pi);
  if (C_scalar) s += ";C=" + num(*C_scalar);
  s += ";J=";
  for (int j : J) s += std::to_string(j) + ",";
  s += ";jcount=" + std::to_string(j_count);
  s += ";delta=" + (delta.value ? num(*delta.value) : "bound(tau=" + num(delta.tau) + ")");
  s += ";nlambda=" + std::to_string(grid.n_lambda) + ";ratio=" + num(grid.ratio);
  s += ";folds=" + std::to_string(folds);
  s += ";tol=" + num(solver.tol) + ";kkt=" + num(solver.kkt_tol);
  s += ";sweeps=" + std::to_string(solver.max_sweeps);
  s += ";peneta=" + std::to_string(solver.penalize_eta ? 1 : 0);
  s += ";pendiag=" + std::to_string(solver.penalize_K_diagonal ? 1 : 0);
  s += ";seed=" + std::to_string(seed);
  return s;
}

std::uint64_t EstimateConfig::fingerprint() const { return stable_hash64(canonical_text()); }

EstimateResult estimate_dataset(const Dataset& data, const EstimateConfig& cfg) {
  const int m = data.m();
  const WeightSpec w = cfg.weights(m);
  const std::vector<int> J = cfg.resolve_J(m);
  const double delta_used = cfg.delta.resolve(data.n(), m);

  QuadraticScoreLoss loss = assemble(data, cfg.spec, w, J);
  if (cfg.spec.mode == Mode::am1) loss = transform_am1(loss);
  loss = apply_diagonal_multiplier(std::move(loss), delta_used);

  const double lmax = lambda_max(loss, cfg.solver);
  std::vector<double> lambdas(static_cast<std::size_t>(cfg.grid.n_lambda));
  for (int k = 0; k < cfg.grid.n_lambda; ++k) {
    const double t = cfg.grid.n_lambda == 1 ? 0.0
                                            : static_cast<double>(k) /
                                                  static_cast<double>(cfg.grid.n_lambda - 1);
    lambdas[static_cast<std::size_t>(k)] = lmax * std::pow(cfg.grid.ratio, t);
  }

  EstimateResult res;
  res.cv = cross_validate_at(data, cfg.spec, w, J, lambdas, cfg.folds,
                             derive_seed(cfg.seed, 0xcfULL), cfg.solver, cfg.delta,
                             cfg.threads);
  res.path = fit_path_at(loss, cfg.solver, lambdas);
  res.chosen = res.path.fits[static_cast<std::size_t>(res.cv.index_star)];
  res.J = J;
  res.delta_used = delta_used;
  res.config_fingerprint = cfg.fingerprint();
  return res;
}

}  // namespace simscore
