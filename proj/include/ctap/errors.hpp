// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ctap {

// Eigengap too small for a well-defined adiabaticity ratio.
struct singular_gap_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Step-doubling audit exceeded tolerance.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fringe extraction failed (insufficient range/resolution, tracking loss).
struct fringe_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ctap
