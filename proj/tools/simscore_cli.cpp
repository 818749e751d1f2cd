// Batch front-end: simulate | estimate | eval | difftest over CSV inputs and
// JSON outputs. Exit codes: 0 ok, 2 parse error, 3 validation error,
// 4 numerical failure (non-convergence still emits the path, flagged).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv_io.hpp"
#include "simscore/inference.hpp"
#include "simscore/sampling.hpp"
#include "simscore/version.hpp"

using json = nlohmann::json;
using namespace simscore;
namespace fs = std::filesystem;

namespace {

int exit_code_for(Err code) {
  switch (code) {
    case Err::ParseError:
      return 2;
    case Err::ZeroDiagonal:
    case Err::SingularUnpenalizedBlock:
    case Err::ZeroAcceptance:
      return 4;
    default:
      return 3;
  }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) {
      if (std::isnan(m(r, c))) {
        row.push_back(nullptr);
      } else {
        row.push_back(m(r, c));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  require(rows > 0, Err::ParseError, "empty matrix in json");
  const auto cols = j.at(0).size();
  Eigen::MatrixXd m(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    require(j.at(r).size() == cols, Err::ParseError, "ragged matrix in json");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<int>(r), static_cast<int>(c)) = j.at(r).at(c).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j.at(i).get<double>();
  return v;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  require(out.good(), Err::ParseError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::ParseError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Err::ParseError, std::string("bad json in ") + path + ": " + e.what());
  }
  return j;
}

// flags shared by every estimating subcommand
struct CommonOpts {
  double a = 0.0;
  double b = 0.0;
  std::string mode = "am1";
  std::optional<double> h_exponent;
  double pi = 1.0;
  std::optional<double> C;
  std::vector<int> J;
  int j_count = 5;
  std::optional<double> lambda;
  int n_lambda = 50;
  double ratio = 0.01;
  std::optional<double> delta;
  double tau = 4.0;
  int folds = 5;
  std::uint64_t seed = 0;
  int threads = 1;
  bool close = false;
  double pseudocount = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--a", a, "interaction exponent a (>= 0)");
    cmd->add_option("--b", b, "linear exponent b (>= 0)");
    cmd->add_option("--mode", mode, "general|symmetric|am1|centered")
        ->check(CLI::IsMember({"general", "symmetric", "am1", "centered"}));
    cmd->add_option("--h-exponent", h_exponent, "weight power c (default 2-a)");
    cmd->add_option("--pi", pi, "truncation quantile in (0,1]");
    cmd->add_option("--C", C, "explicit truncation constant (overrides --pi)");
    cmd->add_option("--J", J, "removed coordinates, 1-based")->delimiter(',');
    cmd->add_option("--J-count", j_count, "number of seeded removed coordinates");
    cmd->add_option("--lambda", lambda, "single penalty (skips the path/CV)");
    cmd->add_option("--n-lambda", n_lambda, "path length");
    cmd->add_option("--ratio", ratio, "lambda_min / lambda_max");
    cmd->add_option("--delta", delta, "explicit diagonal multiplier (>= 1)");
    cmd->add_option("--tau", tau, "tau in the multiplier bound");
    cmd->add_option("--folds", folds, "cross-validation folds");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--threads", threads, "worker cap");
    cmd->add_flag("--close", close, "treat input as counts; close to proportions");
    cmd->add_option("--pseudocount", pseudocount, "pseudocount used with --close");
  }

  ModelSpec spec() const {
    const auto m = mode_from_string(mode);
    require(m.has_value(), Err::InvalidModelSpec, "unknown mode " + mode);
    return ModelSpec(a, b, *m);
  }

  EstimateConfig config() const {
    EstimateConfig cfg;
    cfg.spec = spec();
    cfg.h_exponent = h_exponent ? *h_exponent : std::max(0.0, 2.0 - a);
    if (C) {
      cfg.pi.reset();
      cfg.C_scalar = *C;
    } else {
      cfg.pi = pi;
    }
    for (int j : J) cfg.J.push_back(j - 1);  // CLI is 1-based
    cfg.j_count = j_count;
    if (delta) {
      cfg.delta.value = *delta;
    } else {
      cfg.delta.tau = tau;
    }
    cfg.grid = PathGrid{n_lambda, ratio};
    cfg.folds = folds;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
  }

  Dataset load(const std::string& path) const {
    const simscore_cli::CsvTable t = simscore_cli::read_csv(path);
    Eigen::MatrixXd raw = t.values;
    if (close) {
      for (int i = 0; i < raw.rows(); ++i) {
        raw.row(i) = close_counts(raw.row(i).transpose(), pseudocount).v.transpose();
      }
    }
    Dataset d = Dataset::from_rows(raw, spec());
    d.labels = t.header;
    return d;
  }
};

json config_json(const EstimateConfig& cfg) {
  json j;
  j["a"] = cfg.spec.a;
  j["b"] = cfg.spec.b;
  j["mode"] = to_string(cfg.spec.mode);
  j["h_exponent"] = cfg.h_exponent;
  if (cfg.pi) j["pi"] = *cfg.pi;
  if (cfg.C_scalar) j["C"] = *cfg.C_scalar;
  j["j_count"] = cfg.j_count;
  j["n_lambda"] = cfg.grid.n_lambda;
  j["ratio"] = cfg.grid.ratio;
  if (cfg.delta.value) {
    j["delta"] = *cfg.delta.value;
  } else {
    j["delta_policy"] = "bound";
    j["tau"] = cfg.delta.tau;
  }
  j["folds"] = cfg.folds;
  j["seed"] = cfg.seed;
  return j;
}

char hexdigit(std::uint64_t v) { return "0123456789abcdef"[v & 0xF]; }

std::string hex64(std::uint64_t v) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = hexdigit(v);
    v >>= 4;
  }
  return s;
}

json base_doc(std::uint64_t fingerprint) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["library_version"] = kVersion;
  j["config_fingerprint"] = hex64(fingerprint);
  return j;
}

// ---- simulate ----------------------------------------------------------

int cmd_simulate(const CommonOpts& common, int m, int n, const std::string& truth_kind,
                 int bandwidth, const std::vector<double>& alpha,
                 const std::string& truth_file, const std::string& sampler,
                 int burn_in, int thin, double step_size, const std::string& out_dir) {
  const ModelSpec spec = common.spec();
  ParameterSet truth{Eigen::MatrixXd(), Eigen::VectorXd()};
  json gen;
  gen["kind"] = truth_kind;
  if (truth_kind == "banded") {
    require(m >= 2, Err::DimensionMismatch, "--m required for banded truth");
    truth = banded_K(m, bandwidth);
    gen["s"] = bandwidth;
  } else if (truth_kind == "dirichlet") {
    require(!alpha.empty(), Err::InvalidModelSpec, "--alpha required for dirichlet truth");
    m = static_cast<int>(alpha.size());
    Eigen::VectorXd av(m);
    for (int j = 0; j < m; ++j) av[j] = alpha[static_cast<std::size_t>(j)];
    truth = ParameterSet::make(Mode::general, Eigen::MatrixXd::Zero(m, m),
                               av - Eigen::VectorXd::Ones(m));
    gen["alpha"] = alpha;
  } else if (truth_kind == "file") {
    const json tj = read_json(truth_file);
    Eigen::MatrixXd K = matrix_from_json(tj.at("truth").at("K"));
    Eigen::VectorXd eta = vector_from_json(tj.at("truth").at("eta"));
    m = static_cast<int>(K.rows());
    truth = ParameterSet::make(Mode::general, std::move(K), std::move(eta));
    gen["file"] = truth_file;
  } else {
    fail(Err::InvalidModelSpec, "unknown truth kind " + truth_kind);
  }

  std::string used = sampler;
  Dataset data;
  if (sampler == "auto") {
    const bool loglog = spec.a == 0.0 && spec.b == 0.0;
    const int mm = truth.m();
    if (loglog && truth.K.isZero(0.0) && (truth.eta.array() > -1.0).all()) {
      used = "dirichlet";
    } else if (loglog && std::abs(truth.eta.sum() + mm) <= 1e-10 &&
               (truth.K * Eigen::VectorXd::Ones(mm)).cwiseAbs().maxCoeff() <= 1e-10 &&
               truth.K == truth.K.transpose()) {
      used = "logistic-normal";
    } else {
      used = "mcmc";
    }
  }
  if (used == "dirichlet") {
    data = sample_dirichlet(truth.eta + Eigen::VectorXd::Ones(truth.m()), n, common.seed);
  } else if (used == "logistic-normal") {
    data = sample_logistic_normal(truth, n, common.seed);
  } else if (used == "mcmc") {
    McmcOptions opts;
    opts.burn_in = burn_in;
    opts.thin = thin;
    opts.step_size = step_size;
    opts.seed = common.seed;
    data = sample_ab_mcmc(spec, truth, n, opts);
  } else {
    fail(Err::InvalidModelSpec, "unknown sampler " + used);
  }
  gen["sampler"] = used;

  fs::create_directories(out_dir);
  simscore_cli::write_csv(out_dir + "/data.csv", data.x);

  const EstimateConfig cfg = common.config();
  json doc = base_doc(cfg.fingerprint());
  doc["spec"] = {{"a", spec.a}, {"b", spec.b}, {"mode", to_string(spec.mode)}};
  doc["generator"] = gen;
  doc["m"] = truth.m();
  doc["n"] = n;
  doc["seed"] = common.seed;
  doc["truth"] = {{"K", matrix_to_json(truth.K)}, {"eta", vector_to_json(truth.eta)}};
  write_json(out_dir + "/truth.json", doc);
  return 0;
}

// ---- estimate ----------------------------------------------------------

json fit_to_json(const FitResult& fit, bool with_params) {
  json j;
  j["lambda"] = fit.lambda_K;
  j["converged"] = fit.converged;
  j["sweeps"] = fit.sweeps_used;
  j["kkt_violation"] = fit.kkt_violation;
  j["objective"] = fit.objective;
  long nnz = 0;
  const int m = fit.params.m();
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      if (r != c && std::abs(fit.params.K(r, c)) > kSupportTol) ++nnz;
    }
  }
  j["nnz_off"] = nnz;
  if (with_params) {
    j["K"] = matrix_to_json(fit.params.K);
    j["eta"] = vector_to_json(fit.params.eta);
  }
  return j;
}

int cmd_estimate(const CommonOpts& common, const std::string& data_path,
                 const std::string& out_dir) {
  const Dataset data = common.load(data_path);
  EstimateConfig cfg = common.config();

  fs::create_directories(out_dir);
  json doc = base_doc(cfg.fingerprint());
  doc["config"] = config_json(cfg);
  doc["m"] = data.m();
  doc["n"] = data.n();

  bool all_converged = true;
  if (common.lambda) {
    // single fit at a fixed penalty
    const WeightSpec w = cfg.weights(data.m());
    const std::vector<int> J = cfg.resolve_J(data.m());
    QuadraticScoreLoss loss = assemble(data, cfg.spec, w, J);
    if (cfg.spec.mode == Mode::am1) loss = transform_am1(loss);
    loss = apply_diagonal_multiplier(std::move(loss),
                                     cfg.delta.resolve(data.n(), data.m()));
    SolverOptions so = cfg.solver;
    so.lambda_K = *common.lambda;
    so.lambda_eta = so.penalize_eta ? *common.lambda : 0.0;
    const FitResult fit = coordinate_descent(loss, so);
    all_converged = fit.converged;
    doc["J"] = json::array();
    for (int j : J) doc["J"].push_back(j + 1);
    doc["delta"] = loss.delta;
    doc["chosen"] = fit_to_json(fit, true);
    doc["path"] = json::array({fit_to_json(fit, true)});
  } else {
    const EstimateResult res = estimate_dataset(data, cfg);
    doc["J"] = json::array();
    for (int j : res.J) doc["J"].push_back(j + 1);
    doc["delta"] = res.delta_used;
    doc["lambdas"] = res.cv.lambdas;
    doc["cv"] = {{"lambda_star", res.cv.lambda_star},
                 {"index_star", res.cv.index_star},
                 {"mean_scores", res.cv.mean_scores}};
    json path = json::array();
    for (const FitResult& fit : res.path.fits) {
      if (!fit.converged) all_converged = false;
      path.push_back(fit_to_json(fit, true));
    }
    doc["path"] = std::move(path);
    doc["chosen"] = fit_to_json(res.chosen, true);
    doc["chosen"]["index"] = res.cv.index_star;
  }
  doc["all_converged"] = all_converged;
  write_json(out_dir + "/estimate.json", doc);
  return all_converged ? 0 : 4;
}

// ---- eval --------------------------------------------------------------

int cmd_eval(const std::string& estimate_path, const std::string& truth_path,
             const std::string& out_path) {
  const json est = read_json(estimate_path);
  const json tru = read_json(truth_path);
  Eigen::MatrixXd K0 = matrix_from_json(tru.at("truth").at("K"));
  Eigen::VectorXd eta0 = vector_from_json(tru.at("truth").at("eta"));
  const int m = static_cast<int>(K0.rows());
  require(est.at("m").get<int>() == m, Err::MismatchedTruth,
          "estimate and truth disagree on m");
  const ParameterSet truth =
      ParameterSet::make(Mode::general, std::move(K0), std::move(eta0));

  FitPath path;
  for (const json& pj : est.at("path")) {
    FitResult fit;
    fit.params = ParameterSet::make(Mode::general, matrix_from_json(pj.at("K")),
                                    vector_from_json(pj.at("eta")));
    fit.lambda_K = pj.at("lambda").get<double>();
    path.lambdas.push_back(fit.lambda_K);
    path.fits.push_back(std::move(fit));
  }
  const RocCurve roc = roc_auc(path, truth);

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["library_version"] = kVersion;
  doc["config_fingerprint"] = est.at("config_fingerprint");
  doc["auc"] = roc.auc;
  json per_lambda = json::array();
  for (std::size_t k = 0; k < path.fits.size(); ++k) {
    per_lambda.push_back({{"lambda", path.lambdas[k]},
                          {"fpr", roc.path_points[k].first},
                          {"tpr", roc.path_points[k].second}});
  }
  doc["roc"] = std::move(per_lambda);
  json curve = json::array();
  for (const auto& [f, t] : roc.points) curve.push_back({{"fpr", f}, {"tpr", t}});
  doc["curve"] = std::move(curve);

  const ParameterSet chosen =
      ParameterSet::make(Mode::general, matrix_from_json(est.at("chosen").at("K")),
                         vector_from_json(est.at("chosen").at("eta")));
  const NormErrors err = norm_errors(chosen, truth);
  doc["chosen_errors"] = {{"max", err.max},
                          {"frobenius", err.frobenius},
                          {"spectral", err.spectral},
                          {"max_rel", err.max_rel},
                          {"frobenius_rel", err.frobenius_rel},
                          {"spectral_rel", err.spectral_rel}};
  if (est.contains("cv")) doc["chosen_lambda"] = est.at("cv").at("lambda_star");
  write_json(out_path, doc);
  return 0;
}

// ---- difftest ----------------------------------------------------------

int cmd_difftest(const CommonOpts& common, const std::string& g1_path,
                 const std::string& g2_path, int B, double alpha_level,
                 const std::string& out_path) {
  const Dataset d1 = common.load(g1_path);
  const Dataset d2 = common.load(g2_path);
  PermTestConfig cfg;
  cfg.fit = common.config();
  cfg.B = B;
  cfg.seed = common.seed;
  cfg.threads = common.threads;
  const PermTestResult res = differential_network_test(d1, d2, cfg);

  json doc = base_doc(res.config_fingerprint);
  doc["B"] = res.B;
  doc["alpha"] = alpha_level;
  doc["global_p"] = res.global_p;
  doc["observed_stat"] = res.observed_stat;
  doc["local_p"] = matrix_to_json(res.local_p);
  doc["local_p_adjusted"] = matrix_to_json(res.local_p_adjusted);

  // differential edges at the adjusted threshold, with node degrees
  const int m = d1.m();
  std::vector<int> degree(static_cast<std::size_t>(m), 0);
  json edges = json::array();
  for (int r = 0; r < m; ++r) {
    for (int c = r + 1; c < m; ++c) {
      const double p = res.local_p_adjusted(r, c);
      if (!std::isnan(p) && p < alpha_level) {
        edges.push_back({{"i", r + 1}, {"j", c + 1}, {"p_adjusted", p}});
        degree[static_cast<std::size_t>(r)] += 1;
        degree[static_cast<std::size_t>(c)] += 1;
      }
    }
  }
  doc["differential_edges"] = std::move(edges);
  doc["node_degrees"] = degree;
  json hubs = json::array();
  for (int v = 0; v < m; ++v) {
    if (degree[static_cast<std::size_t>(v)] >= 5) hubs.push_back(v + 1);
  }
  doc["hub_nodes"] = std::move(hubs);
  write_json(out_path, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"score-matching estimation for power-interaction models of "
               "compositional data"};
  app.require_subcommand(1);

  CommonOpts common;

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw synthetic compositional data");
  common.attach(sim);
  int sim_m = 0, sim_n = 100, sim_s = 2, burn_in = 2000, thin = 10;
  double step_size = 0.5;
  std::string truth_kind = "banded", truth_file, sampler = "auto", out_dir = "out";
  sim->add_option("--m", sim_m, "number of components");
  sim->add_option("--n", sim_n, "number of samples");
  sim->add_option("--truth", truth_kind, "banded|dirichlet|file")
      ->check(CLI::IsMember({"banded", "dirichlet", "file"}));
  sim->add_option("--s", sim_s, "bandwidth for the banded truth");
  std::vector<double> sim_alpha;
  sim->add_option("--alpha", sim_alpha, "Dirichlet parameters")->delimiter(',');
  sim->add_option("--truth-file", truth_file, "truth.json to resample from");
  sim->add_option("--sampler", sampler, "auto|dirichlet|logistic-normal|mcmc");
  sim->add_option("--burn-in", burn_in, "MCMC burn-in sweeps");
  sim->add_option("--thin", thin, "MCMC thinning");
  sim->add_option("--step-size", step_size, "initial MCMC step size");
  sim->add_option("--out", out_dir, "output directory");

  // estimate
  auto* est = app.add_subcommand("estimate", "fit a regularization path with CV");
  CommonOpts est_common;
  est_common.attach(est);
  std::string est_data, est_out = "out";
  est->add_option("data", est_data, "input csv (rows = samples)")->required();
  est->add_option("--out", est_out, "output directory");

  // eval
  auto* ev = app.add_subcommand("eval", "score an estimate against a known truth");
  std::string ev_estimate, ev_truth, ev_out = "metrics.json";
  ev->add_option("--estimate", ev_estimate, "estimate.json from `estimate`")->required();
  ev->add_option("--truth", ev_truth, "truth.json from `simulate`")->required();
  ev->add_option("--out", ev_out, "output file");

  // difftest
  auto* dt = app.add_subcommand("difftest", "permutation test between two groups");
  CommonOpts dt_common;
  dt_common.attach(dt);
  std::string g1, g2, dt_out = "report.json";
  int B = 500;
  double alpha_level = 0.05;
  dt->add_option("group1", g1, "first group csv")->required();
  dt->add_option("group2", g2, "second group csv")->required();
  dt->add_option("--B", B, "permutation replicates");
  dt->add_option("--alpha-level", alpha_level, "threshold for the edge list");
  dt->add_option("--out", dt_out, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(common, sim_m, sim_n, truth_kind, sim_s, sim_alpha, truth_file,
                          sampler, burn_in, thin, step_size, out_dir);
    }
    if (est->parsed()) return cmd_estimate(est_common, est_data, est_out);
    if (ev->parsed()) return cmd_eval(ev_estimate, ev_truth, ev_out);
    if (dt->parsed()) return cmd_difftest(dt_common, g1, g2, B, alpha_level, dt_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
