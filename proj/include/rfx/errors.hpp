#pragma once

#include <stdexcept>
#include <string>

namespace rfx {

// Model violates the linear-mixture invariants (bad rows, invalid file, ...).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance generation could not satisfy the invariants within its retry budget.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation called on a state that is not ready for it.
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace rfx
