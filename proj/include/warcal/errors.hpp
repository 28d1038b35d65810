#pragma once

#include <stdexcept>

namespace warcal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generic precondition breach (bad sizes that are not shape mismatches,
// non-positive parameters, unresolved kernel specs, ...).
struct InvalidInput : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// A required class has no samples (single-class source domain, class
// missing from the truth labels of a BCA evaluation, ...).
struct MissingClassError : Error {
  using Error::Error;
};

struct NonFiniteInput : Error {
  using Error::Error;
};

// All rows identical; no bandwidth can be derived.
struct DegenerateData : Error {
  using Error::Error;
};

// MMD block with zero source or zero target samples.
struct EmptyBlock : Error {
  using Error::Error;
};

struct MissingPseudoLabels : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct TooFewValues : Error {
  using Error::Error;
};

struct TooFewDomains : Error {
  using Error::Error;
};

struct EmptyCurve : Error {
  using Error::Error;
};

struct EmptyEnsemble : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace warcal
