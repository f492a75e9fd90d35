#pragma once

#include <stdexcept>
#include <string>

namespace qlbits {

/// Invalid input parameters (infeasible degrees, out-of-range probabilities, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A randomized generator could not satisfy its invariants within its attempt budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No integer plan satisfies the branch's constraint set.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested tuning ratio diverges for this state; the inverse branch must be used.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke a documented precondition (asymmetric input to a symmetric solver, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ReducibleChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qlbits
