#pragma once

#include <stdexcept>
#include <string>

namespace levyclt {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or measure violates one of its construction invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

class DegenerateModel : public ModelError {
 public:
  DegenerateModel() : ModelError("degenerate model: total variance is zero") {}
  explicit DegenerateModel(const std::string& what) : ModelError(what) {}
};

class InfiniteVariance : public ModelError {
 public:
  using ModelError::ModelError;
};

class InvalidMeasure : public ModelError {
 public:
  using ModelError::ModelError;
};

/// A requested tail functional is infinite for the given measure.
class DivergentRequest : public Error {
 public:
  using Error::Error;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

class UnsupportedMeasure : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class InvalidPlan : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class EmptySample : public Error {
 public:
  EmptySample() : Error("empty sample") {}
};

class NonpositiveScale : public Error {
 public:
  NonpositiveScale() : Error("scale must be positive") {}
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature failed to converge or an internal cross-check disagreed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input document is not well formed (bad JSON, missing or mistyped fields).
class DocumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace levyclt
