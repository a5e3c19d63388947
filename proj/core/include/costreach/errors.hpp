#pragma once

#include <stdexcept>

namespace costreach {

/// Config or argument rejected before any computation ran.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Field file unreadable: bad magic, unsupported version, truncated payload.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A model evaluator (vector field or cost) produced a non-finite value.
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A Bellman sweep produced a non-finite candidate value.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Oracle enumeration would exceed its sequence budget.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace costreach
