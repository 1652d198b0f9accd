#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace augtree {

/// Rejected IFS configuration. `invariant()` names the violated condition.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// A configured analysis cap was exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition of an analysis stage does not hold (levels differ, depth unexplored, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace augtree
