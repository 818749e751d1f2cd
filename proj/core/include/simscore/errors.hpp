#pragma once

#include <stdexcept>
#include <string>

namespace simscore {

// Error codes mirror the failure modes of the public operations. Exceptions
// carry a code so callers (and the CLI exit-code mapping) can dispatch
// without parsing messages.
enum class Err {
  // composition / dataset validation
  NegativeEntry,
  SumOutOfTolerance,
  ZeroEntryWithLogModel,
  AllZeroNoPseudocount,
  DomainError,
  DimensionMismatch,
  // model construction
  InvalidModelSpec,
  AsymmetricGamma,
  ConstraintViolated,
  NotPositiveDefinite,
  // weights / assembly
  InvalidWeights,
  EmptyJ,
  IndexOutOfRange,
  DeltaBelowOne,
  NonpositiveN,
  WrongMode,
  // solver
  ZeroDiagonal,
  SingularUnpenalizedBlock,
  // sampling
  NonpositiveAlpha,
  NotNormalizable,
  ZeroAcceptance,
  BandwidthTooLarge,
  // evaluation / inference
  DegenerateTruth,
  TooFewSamples,
  POutOfRange,
  MismatchedTruth,
  // io
  ParseError,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace simscore
