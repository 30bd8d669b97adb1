#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace occupancy {

/// An ensemble specification or experiment configuration violates one or more
/// invariants. Every violated invariant is listed, not just the first.
class SpecError : public std::invalid_argument {
 public:
  explicit SpecError(std::vector<std::string> violations);
  explicit SpecError(const std::string& violation)
      : SpecError(std::vector<std::string>{violation}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// An iterative solver failed to converge, or a numeric precondition could not
/// be established (bracket growth, non-finite residuals).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact enumeration would exceed the configured state budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace occupancy
