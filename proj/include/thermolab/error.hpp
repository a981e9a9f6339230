#pragma once

#include <stdexcept>
#include <string>

namespace thermolab {

enum class ErrorKind {
  invalid_dimension,
  invalid_parameter,
  degenerate_state,
  index_out_of_range,
  insufficient_data,
  invalid_initial_condition,
  unsupported_model,
  step_size,
  grid_mismatch,
  parse_error,
  io_error,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Every precondition violation surfaces as one of
/// these, tagged with the kind so callers (the CLI in particular) can map it
/// to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace thermolab
