#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ifslab {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible dimensions.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A precondition on an argument failed (non-positive tolerance, bad weights, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

/// A work budget (points, atoms, words, solver size) would be exceeded.
struct BudgetExceeded : Error {
  BudgetExceeded(const std::string& what, std::size_t budget, std::size_t requested)
      : Error(what), budget(budget), requested(requested) {}
  std::size_t budget = 0;
  std::size_t requested = 0;
};

/// A map application left the configured phase box by more than the allowed slack.
struct BoxEscape : Error {
  BoxEscape(const std::string& what, double excess) : Error(what), excess(excess) {}
  double excess = 0.0;
};

/// An iteration hit its cap without meeting its convergence tolerance.
struct NoConvergence : Error {
  NoConvergence(const std::string& what, double last_gap, std::size_t n_max)
      : Error(what), last_gap(last_gap), n_max(n_max) {}
  double last_gap = 0.0;
  std::size_t n_max = 0;
};

/// A parameter law gives some ball probability zero; carries the offending label.
struct NotFair : Error {
  NotFair(const std::string& what, int label) : Error(what), label(label) {}
  int label = 0;  // 1-based; 0 when not label-specific
};

/// Observable name not present in the registry.
struct UnknownObservable : Error {
  using Error::Error;
};

/// Configuration file is malformed or fails validation.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ifslab
