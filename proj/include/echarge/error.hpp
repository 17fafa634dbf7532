#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace echarge {

enum class ErrorKind {
  InvalidInput,
  NumericalFailure,
  NoRoot,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::NoRoot: return "no-root";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void invalid_input(const std::string& what) {
  throw Error(ErrorKind::InvalidInput, what);
}

[[noreturn]] inline void numerical_failure(const std::string& what) {
  throw Error(ErrorKind::NumericalFailure, what);
}

}  // namespace echarge
