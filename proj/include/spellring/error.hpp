#ifndef SPELLRING_ERROR_HPP
#define SPELLRING_ERROR_HPP

#include <stdexcept>
#include <string>

namespace spellring {

// Error categories, kept in sync with the sr_status codes of the C API.
enum class ErrorKind {
  InvalidArgument,
  Config,
  Format,
  InsufficientData,
  Alignment,
  InfeasibleAlignment,
  Numeric,
  Data,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

const char* error_kind_name(ErrorKind kind) noexcept;

}  // namespace spellring

#endif
