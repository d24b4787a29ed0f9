#pragma once

#include <stdexcept>
#include <string>

namespace ppc {

// Error taxonomy used across the library.  CLI maps these onto exit codes.
struct incompatible_basis_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_state_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct insufficient_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct singular_system_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ppc
