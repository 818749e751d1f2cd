#pragma once

#include <cstdint>
#include <string>

#include "simscore/evaluation.hpp"

namespace simscore {

// One estimation run: assemble (averaged over J), am1 transform when the mode
// asks for it, diagonal multiplier, cross-validated lambda on a shared grid,
// and a final warm-started path on the full data.
struct EstimateConfig {
  ModelSpec spec;
  double h_exponent = 2.0;           // common weight power c
  std::optional<double> pi = 1.0;    // quantile truncation...
  std::optional<double> C_scalar;    // ...or an explicit constant
  std::vector<int> J;                // explicit removed set; empty -> sampled
  int j_count = 1;
  DeltaPolicy delta;
  SolverOptions solver;
  PathGrid grid;
  int folds = 5;
  std::uint64_t seed = 0;
  int threads = 1;

  WeightSpec weights(int m) const;
  std::vector<int> resolve_J(int m) const;
  // canonical text form of everything that determines the fit (seed included,
  // thread count excluded); hashed into the configuration fingerprint
  std::string canonical_text() const;
  std::uint64_t fingerprint() const;
};

struct EstimateResult {
  FitPath path;
  CrossValResult cv;
  FitResult chosen;            // full-data fit at lambda_star
  std::vector<int> J;
  double delta_used = 0.0;
  std::uint64_t config_fingerprint = 0;
};

EstimateResult estimate_dataset(const Dataset& data, const EstimateConfig& cfg);

std::uint64_t stable_hash64(const std::string& text);

}  // namespace simscore
