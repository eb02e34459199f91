#pragma once

#include <stdexcept>
#include <string>

namespace qmb {

// Mismatched variables/orders, unknown names, wrong vector lengths.
struct StructuralError : std::logic_error {
  using std::logic_error::logic_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// alpha = 0, m = 0 where a division by it is needed, and similar.
struct DegenerateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NotApplicableError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExistenceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qmb
