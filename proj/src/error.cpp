#include "mechtomo/error.hpp"

namespace mechtomo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_index: return "invalid-index";
    case ErrorKind::truncation_too_small: return "truncation-too-small";
    case ErrorKind::invalid_operator: return "invalid-operator";
    case ErrorKind::invalid_state: return "invalid-state";
    case ErrorKind::invalid_geometry: return "invalid-geometry";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::unmatchable: return "unmatchable";
    case ErrorKind::invalid_intensity: return "invalid-intensity";
    case ErrorKind::unobservable: return "unobservable";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::improbable_outcome: return "improbable-outcome";
    case ErrorKind::contract: return "contract";
  }
  return "unknown";
}

ContractError::ContractError(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      module_(std::move(module)) {}

}  // namespace mechtomo
