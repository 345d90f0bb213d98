#pragma once

#include <stdexcept>
#include <string>

namespace spininterp {

/// Raised when a caller violates an operation's documented precondition.
/// The CLI maps this family to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index space or memory footprint beyond what the implementation supports.
class CapacityError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A computation whose estimated cost exceeds the configured work budget.
class BudgetExceeded : public PreconditionError {
 public:
  BudgetExceeded(const std::string& what, double log10_cost)
      : PreconditionError(what), log10_cost_(log10_cost) {}
  double log10_cost() const noexcept { return log10_cost_; }

 private:
  double log10_cost_;
};

}  // namespace spininterp
