#pragma once

#include <stdexcept>
#include <string>

namespace absorb {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes are not a well-formed graph file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a structural precondition (absorption,
/// weights, self-loops, duplicate arcs, strong connectivity).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical kernel could not produce a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A pivot fell below the singularity threshold during factorization.
class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An iterative solver ran out of iterations.
class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, double residual)
      : NumericalError(what + " (final residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Exhaustive forest enumeration refused: graph above the size cap.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

/// Distance and centrality are only defined for balanced graphs.
class NotBalanced : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Two construction routes for the absorption inverse disagree.
class RouteDisagreement : public Error {
 public:
  using Error::Error;
};

}  // namespace absorb
