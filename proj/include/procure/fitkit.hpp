#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procure/error.hpp"

namespace procure::fitkit {

enum class Family { truncated_normal, pareto, negative_binomial };

std::string_view to_string(Family family) noexcept;
/// Accepts "truncated-normal", "pareto", "negative-binomial". Throws
/// invalid_argument naming the valid families otherwise.
Family parse_family(std::string_view name);
const std::vector<Family>& all_families();

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Maximum-likelihood fit and model-selection metrics for one family.
///
/// Parameters by family:
///   truncated-normal   mu, sigma, lower, upper  (bounds count as free only
///                      when estimated from the data)
///   pareto             scale, shape
///   negative-binomial  size, prob (fitted to data rounded to integers)
struct FitReport {
  Family family = Family::truncated_normal;
  std::vector<std::string> param_names;
  std::vector<double> params;
  std::size_t free_parameters = 0;
  std::size_t sample_size = 0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double rmse = 0.0;  // fitted bin-average density vs 40-bin normalized histogram
  double ks_statistic = 0.0;
  std::vector<std::string> notes;
};

FitReport fit(Family family, std::span<const double> data,
              std::optional<Bounds> fixed_bounds = std::nullopt);

struct FitFailure {
  Family family = Family::truncated_normal;
  ErrorKind kind = ErrorKind::nonconvergence;
  std::string message;
};

struct Comparison {
  std::vector<FitReport> ranking;  // ascending AIC, then BIC, then family name
  std::vector<FitFailure> failures;
};

/// Fits every family; failed families are reported in `failures` and left out
/// of the ranking. Throws invalid_argument if `families` is empty.
Comparison compare(std::span<const double> data, std::span<const Family> families,
                   std::optional<Bounds> fixed_bounds = std::nullopt);

/// sup |F_n - F| for a continuous CDF over ascending-sorted data.
template <typename Cdf>
double ks_continuous(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double below = f - static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n - f;
    d = below > d ? below : d;
    d = above > d ? above : d;
  }
  return d;
}

inline constexpr std::size_t kHistogramBins = 40;

}  // namespace procure::fitkit
