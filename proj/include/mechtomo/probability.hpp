#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "mechtomo/error.hpp"

namespace mechtomo {

// Round-off slack allowed before a probability is clamped into [0, 1].
inline constexpr double kProbabilitySlack = 1e-10;

// Clamps p into [0, 1]; throws when p lies more than kProbabilitySlack outside.
inline double checked_probability(double p, const char* module) {
  if (!std::isfinite(p) || p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack) {
    throw ContractError(ErrorKind::contract, module, "probability out of range: " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace mechtomo
