#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace giwvol {

enum class ErrorKind {
  kNotPositiveDefinite,
  kDomain,
  kDimensionMismatch,
  kRankMismatch,
  kParse,
  kNonPositivePrice,
  kEmptyInput,
  kValidation,
  kNumerical,
  kIo,
};

/// Base exception for every failure raised by the library. The optional
/// step index names the time point t at which a sequential computation broke.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<long> step = std::nullopt)
      : std::runtime_error(what), kind_(kind), step_(step) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<long> step() const noexcept { return step_; }

 private:
  ErrorKind kind_;
  std::optional<long> step_;
};

/// Re-raise `e` tagged with time index `t` (keeps the kind, prefixes the message).
[[noreturn]] inline void rethrow_at_step(const Error& e, long t) {
  throw Error(e.kind(), "t=" + std::to_string(t) + ": " + e.what(), t);
}

}  // namespace giwvol
