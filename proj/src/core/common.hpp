#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ptcov {

enum class ErrorKind {
  invalid_argument,  // bad parameters or config
  io,                // file system problems
  data,              // malformed or inconsistent input data
  numeric,           // estimation / solver failures
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ptcov
