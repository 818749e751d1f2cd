#include "simscore/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "simscore/parallel.hpp"
#include "simscore/rng.hpp"

namespace simscore {

std::vector<double> by_adjust(const std::vector<double>& p) {
  const std::size_t k = p.size();
  for (double v : p) {
    require(v >= 0.0 && v <= 1.0 && !std::isnan(v), Err::POutOfRange,
            "p-values must lie in [0, 1]");
  }
  if (k == 0) return {};
  double ck = 0.0;
  for (std::size_t l = 1; l <= k; ++l) ck += 1.0 / static_cast<double>(l);

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  std::vector<double> adjusted(k);
  double running = 1.0;
  for (std::size_t i = k; i-- > 0;) {
    const double candidate = std::min(
        1.0, static_cast<double>(k) * ck * p[order[i]] / static_cast<double>(i + 1));
    running = std::min(running, candidate);
    adjusted[order[i]] = running;
  }
  return adjusted;
}

namespace {

struct GroupFits {
  ParameterSet k1{Eigen::MatrixXd(), Eigen::VectorXd()};
  ParameterSet k2{Eigen::MatrixXd(), Eigen::VectorXd()};
  std::uint64_t fp1 = 0;
  std::uint64_t fp2 = 0;
};

ParameterSet fit_group(const Dataset& data, const EstimateConfig& base,
                       std::uint64_t fit_seed, std::uint64_t* fp) {
  EstimateConfig cfg = base;
  cfg.seed = fit_seed;
  cfg.threads = 1;  // parallelism lives at the replicate level
  const EstimateResult res = estimate_dataset(data, cfg);
  if (fp) {
    // fingerprint of the shared configuration (seed varies per refit by design)
    EstimateConfig shared = cfg;
    shared.seed = 0;
    *fp = shared.fingerprint();
  }
  return res.chosen.params;
}

long support_symdiff(const ParameterSet& a, const ParameterSet& b, double tol) {
  const int m = a.m();
  long count = 0;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      if (r == c) continue;
      const bool ea = std::abs(a.K(r, c)) > tol;
      const bool eb = std::abs(b.K(r, c)) > tol;
      if (ea != eb) ++count;
    }
  }
  return count;
}

}  // namespace

PermTestResult differential_network_test(const Dataset& d1, const Dataset& d2,
                                         const PermTestConfig& cfg) {
  const int m = d1.m();
  require(d2.m() == m, Err::DimensionMismatch, "groups must share m");
  require(cfg.B >= 1, Err::InvalidModelSpec, "B must be >= 1");
  const int n1 = d1.n();
  const int n2 = d2.n();

  Dataset pooled;
  pooled.x.resize(n1 + n2, m);
  pooled.x.topRows(n1) = d1.x;
  pooled.x.bottomRows(n2) = d2.x;

  PermTestResult res;
  res.B = cfg.B;

  // observed fits (replicate index 0)
  GroupFits observed;
  observed.k1 = fit_group(d1, cfg.fit, derive_seed(cfg.seed, 1), &observed.fp1);
  observed.k2 = fit_group(d2, cfg.fit, derive_seed(cfg.seed, 2), &observed.fp2);
  require(observed.fp1 == observed.fp2, Err::InvalidModelSpec,
          "pipeline configuration fingerprints diverged");
  res.config_fingerprint = observed.fp1;
  res.k1 = observed.k1;
  res.k2 = observed.k2;
  res.observed_stat = support_symdiff(observed.k1, observed.k2, kSupportTol);
  const Eigen::MatrixXd obs_diff = (observed.k1.K - observed.k2.K).cwiseAbs();

  // replicates share one permutation stream; each serves both tests
  std::vector<long> rep_stat(static_cast<std::size_t>(cfg.B));
  std::vector<Eigen::MatrixXd> rep_diff(static_cast<std::size_t>(cfg.B));
  parallel_for(cfg.B, cfg.threads, [&](int rep) {
    const int b = rep + 1;
    std::vector<int> perm(static_cast<std::size_t>(n1 + n2));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(cfg.seed, 3ULL * static_cast<std::uint64_t>(b)));
    rng.shuffle(perm);

    Dataset g1, g2;
    g1.x.resize(n1, m);
    g2.x.resize(n2, m);
    for (int i = 0; i < n1; ++i) g1.x.row(i) = pooled.x.row(perm[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n2; ++i) {
      g2.x.row(i) = pooled.x.row(perm[static_cast<std::size_t>(n1 + i)]);
    }

    std::uint64_t fp1 = 0, fp2 = 0;
    const ParameterSet k1 =
        fit_group(g1, cfg.fit, derive_seed(cfg.seed, 3ULL * static_cast<std::uint64_t>(b) + 1),
                  &fp1);
    const ParameterSet k2 =
        fit_group(g2, cfg.fit, derive_seed(cfg.seed, 3ULL * static_cast<std::uint64_t>(b) + 2),
                  &fp2);
    require(fp1 == res.config_fingerprint && fp2 == res.config_fingerprint,
            Err::InvalidModelSpec, "pipeline configuration fingerprints diverged");
    rep_stat[static_cast<std::size_t>(rep)] = support_symdiff(k1, k2, kSupportTol);
    rep_diff[static_cast<std::size_t>(rep)] = (k1.K - k2.K).cwiseAbs();
  });

  long global_hits = 0;
  Eigen::MatrixXd local_hits = Eigen::MatrixXd::Zero(m, m);
  for (int rep = 0; rep < cfg.B; ++rep) {
    if (res.observed_stat <= rep_stat[static_cast<std::size_t>(rep)]) ++global_hits;
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        if (r == c) continue;
        if (obs_diff(r, c) <= rep_diff[static_cast<std::size_t>(rep)](r, c)) {
          local_hits(r, c) += 1.0;
        }
      }
    }
  }
  res.global_p = static_cast<double>(global_hits) / static_cast<double>(cfg.B);
  res.local_p = local_hits / static_cast<double>(cfg.B);
  res.local_p.diagonal().setConstant(std::numeric_limits<double>::quiet_NaN());

  // adjust over the tested pairs: unordered in the symmetric modes
  const bool symmetric_mode =
      cfg.fit.spec.mode == Mode::symmetric || cfg.fit.spec.mode == Mode::am1;
  std::vector<double> raw;
  std::vector<std::pair<int, int>> where;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      if (r == c) continue;
      if (symmetric_mode && r > c) continue;
      raw.push_back(res.local_p(r, c));
      where.emplace_back(r, c);
    }
  }
  const std::vector<double> adj = by_adjust(raw);
  res.local_p_adjusted =
      Eigen::MatrixXd::Constant(m, m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < where.size(); ++i) {
    const auto [r, c] = where[i];
    res.local_p_adjusted(r, c) = adj[i];
    if (symmetric_mode) res.local_p_adjusted(c, r) = adj[i];
  }
  return res;
}

double global_perm_test(const Dataset& d1, const Dataset& d2, const PermTestConfig& cfg) {
  return differential_network_test(d1, d2, cfg).global_p;
}

Eigen::MatrixXd local_perm_test(const Dataset& d1, const Dataset& d2,
                                const PermTestConfig& cfg) {
  return differential_network_test(d1, d2, cfg).local_p;
}

}  // namespace simscore
