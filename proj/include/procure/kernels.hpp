#pragma once

// Data-parallel inner loops of the Monte Carlo engine. Each kernel has a plain
// serial reference (`*_serial`) kept for tests and benchmarks, and an OpenMP
// version used by the library.
//
// The OpenMP reductions sum fixed-size blocks and then combine the block
// partials in index order, so results are bit-identical for every thread
// count. They are not bit-identical to the serial references, whose left-to-
// right accumulation rounds differently.

#include <cstddef>
#include <span>

#include "procure/truncated_normal.hpp"

namespace procure::kernels {

inline constexpr std::size_t kBlockSize = 4096;

struct MarginRates {
  double price = 0.0;
  double salvage = 0.0;
  double penalty = 0.0;
};

/// Sample means over the draw set for order quantity q, plus the sample
/// variance of the per-draw margin p*min(q,D) + s*(q-D)^+ - r*(D-q)^+.
struct NewsvendorMoments {
  double sales = 0.0;     // mean of min(q, D)
  double leftover = 0.0;  // mean of (q - D)^+
  double excess = 0.0;    // mean of (D - q)^+
  double demand = 0.0;    // mean of D
  double fill = 0.0;      // mean of min(q, D) / D
  double margin = 0.0;    // mean per-draw margin
  double margin_variance = 0.0;  // unbiased sample variance of the margin
  std::size_t count = 0;
};

void quantile_transform_serial(const TruncatedNormal& dist, std::span<const double> u,
                               std::span<double> out);
void quantile_transform(const TruncatedNormal& dist, std::span<const double> u,
                        std::span<double> out);

NewsvendorMoments newsvendor_moments_serial(std::span<const double> demand, double q,
                                            const MarginRates& rates);
NewsvendorMoments newsvendor_moments(std::span<const double> demand, double q,
                                     const MarginRates& rates);

/// Per-draw fill rate min(q, D) / D.
void fill_rates_serial(std::span<const double> demand, double q, std::span<double> out);
void fill_rates(std::span<const double> demand, double q, std::span<double> out);

}  // namespace procure::kernels
