#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace procure {

enum class ErrorKind {
  invalid_distribution,
  out_of_range,
  invalid_argument,
  empty_data,
  data_outside_support,
  degenerate_data,
  nonconvergence,
  negative_cost,
  degenerate_economics,
  weight_sum,
  rank_deficient,
  no_threshold_in_range,
  validation,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace procure
