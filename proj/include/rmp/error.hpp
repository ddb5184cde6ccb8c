#pragma once

/*
 * Error taxonomy shared by the geometry, measure, walk and statistics layers.
 * The CLI maps these onto process exit codes.
 */

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rmp {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input matrix is singular below the invertibility threshold.
struct SingularInput : Error {
  using Error::Error;
};

/// The eigenvalue routine failed to converge (numerically pathological input).
struct EigenFailure : Error {
  using Error::Error;
};

/// Parameter outside its documented domain.
struct DomainError : Error {
  using Error::Error;
};

/// Exact evaluation requested of a parametric sampler measure.
struct UnsupportedForSampler : Error {
  using Error::Error;
};

/// A walk step produced non-finite entries before renormalization.
struct OverflowError : Error {
  using Error::Error;
};

/// Too few trials or points for the requested estimator.
struct InsufficientSamples : Error {
  using Error::Error;
};

/// The empirical variance collapsed although the measure flags promise
/// an unbounded image.
struct DegenerateVariance : Error {
  using Error::Error;
};

/// Operation requires algebraic flags the measure does not assert.
struct FlagViolation : Error {
  using Error::Error;
};

/// Empty input where at least one value is required.
struct EmptyInput : Error {
  using Error::Error;
};

/// Malformed configuration file or command line.
struct ConfigError : Error {
  using Error::Error;
};

/// Failure inside a Monte Carlo trial, annotated with the trial index.
struct TrialFailure : Error {
  TrialFailure(std::uint64_t trial_index, const std::string& what)
      : Error("trial " + std::to_string(trial_index) + ": " + what),
        trial(trial_index) {}
  std::uint64_t trial;
};

}  // namespace rmp
