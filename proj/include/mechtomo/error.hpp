#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mechtomo {

enum class ErrorKind {
  invalid_dimension,
  invalid_index,
  truncation_too_small,
  invalid_operator,
  invalid_state,
  invalid_geometry,
  division_by_zero,
  unmatchable,
  invalid_intensity,
  unobservable,
  ill_conditioned,
  improbable_outcome,
  contract,
};

std::string_view to_string(ErrorKind kind);

// Raised when a module contract (precondition or numerical guard) is violated.
// The CLI maps every ContractError to exit status 3.
class ContractError : public std::runtime_error {
 public:
  ContractError(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace mechtomo
