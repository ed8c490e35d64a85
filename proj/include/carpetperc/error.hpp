#pragma once

#include <stdexcept>
#include <string>

namespace carpetperc {

enum class ErrorKind {
  InvalidAddress,
  Capacity,
  NotAVertex,
  Level,
  Domain,
  Index,
  Pairing,
  Geometry,
  Argument,
  Depth,
  Subcritical,
  Saturation,
  Starvation,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace carpetperc
