#pragma once

#include <cstdint>
#include <stdexcept>

#include "wcg/instance.hpp"

namespace wcg {

class OracleCapExceeded : public std::runtime_error {
 public:
  explicit OracleCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Exact optimum of the joint finite-population control problem at scale h, in
// per-unit-h reward units, computed by backward induction over joint census
// states. Decisions range over every per-row action split whose raw coupling
// sums stay at or below zero. The product of census-space size and horizon
// must stay within cap (state-time pairs), otherwise OracleCapExceeded.
double exact_oracle(const WcgInstance& inst, std::int64_t h, std::int64_t cap = 1000000);

}  // namespace wcg
