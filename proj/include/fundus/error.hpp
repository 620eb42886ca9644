#pragma once

#include <stdexcept>
#include <string>

namespace fundus {

enum class ErrorCode {
  InvalidInput,
  Io,
  Format,
  Degenerate,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline Error invalid_input(const std::string& what) {
  return Error(ErrorCode::InvalidInput, what);
}

inline Error io_error(const std::string& what) {
  return Error(ErrorCode::Io, what);
}

inline Error format_error(const std::string& what) {
  return Error(ErrorCode::Format, what);
}

}  // namespace fundus
