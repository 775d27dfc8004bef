#pragma once

#include <stdexcept>

namespace snkb {

/// Thrown when a simulation contradicts a quantity that is guaranteed by
/// theory (e.g. a constructive claim verified step by step). Distinct from
/// std::runtime_error so drivers can map it to a dedicated exit code.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace snkb
