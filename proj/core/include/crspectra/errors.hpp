#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crspectra {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point that should lie on the unit sphere does not, beyond tolerance.
class OffSphereError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix/polynomial ambient dimensions do not agree.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Cayley-type map evaluated at (or too close to) its excluded pole.
class PoleSingularityError : public Error {
 public:
  using Error::Error;
};

/// Malformed polynomial text, factor description, or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Requested basis is larger than the hard monomial budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

/// Conformal factor is not strictly positive at a quadrature node.
class NonPositiveFactorError : public Error {
 public:
  NonPositiveFactorError(const std::string& what, std::size_t node_index)
      : Error(what), node_index(node_index) {}
  std::size_t node_index;
};

/// Rank truncation of the trial space left fewer than two dimensions.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// The dense eigensolver did not converge.
class EigensolverFailureError : public Error {
 public:
  using Error::Error;
};

/// More than one discrete eigenvalue sits below the kernel threshold.
class KernelDimensionAnomalyError : public Error {
 public:
  KernelDimensionAnomalyError(const std::string& what, int kernel_count)
      : Error(what), kernel_count(kernel_count) {}
  int kernel_count;
};

/// Balance solver exhausted its iteration/multi-start budget.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double best_residual, double best_t)
      : Error(what), best_residual(best_residual), best_t(best_t) {}
  double best_residual;
  double best_t;
};

/// Measure whose support is a single point; it can never be balanced.
class DegenerateMeasureError : public Error {
 public:
  using Error::Error;
};

/// Rayleigh test function with (numerically) vanishing centered norm.
class DegenerateTestFunctionError : public Error {
 public:
  using Error::Error;
};

}  // namespace crspectra
