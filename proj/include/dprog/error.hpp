#pragma once

#include <stdexcept>
#include <string>

namespace dprog {

/// Broad failure categories. The C API maps these one-to-one onto its
/// status codes, and the CLI prints the category name in front of the message.
enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Numerical,
  Io,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace dprog
