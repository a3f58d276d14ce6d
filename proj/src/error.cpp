#include "procure/error.hpp"

namespace procure {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_distribution: return "invalid-distribution";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::empty_data: return "empty-data";
    case ErrorKind::data_outside_support: return "data-outside-support";
    case ErrorKind::degenerate_data: return "degenerate-data";
    case ErrorKind::nonconvergence: return "optimizer-nonconvergence";
    case ErrorKind::negative_cost: return "negative-cost";
    case ErrorKind::degenerate_economics: return "degenerate-economics";
    case ErrorKind::weight_sum: return "weight-sum-violation";
    case ErrorKind::rank_deficient: return "rank-deficient-design";
    case ErrorKind::no_threshold_in_range: return "no-threshold-in-range";
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace procure
