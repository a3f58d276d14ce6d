#include "procure/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "procure/error.hpp"

namespace procure::kernels {

namespace {

struct Sums {
  double sales = 0.0;
  double leftover = 0.0;
  double excess = 0.0;
  double demand = 0.0;
  double fill = 0.0;
  double margin = 0.0;

  Sums& operator+=(const Sums& o) {
    sales += o.sales;
    leftover += o.leftover;
    excess += o.excess;
    demand += o.demand;
    fill += o.fill;
    margin += o.margin;
    return *this;
  }
};

inline void accumulate(Sums& s, double d, double q, const MarginRates& rates) {
  const double sold = std::min(q, d);
  const double left = std::max(q - d, 0.0);
  const double short_units = std::max(d - q, 0.0);
  s.sales += sold;
  s.leftover += left;
  s.excess += short_units;
  s.demand += d;
  s.fill += sold / d;
  s.margin += rates.price * sold + rates.salvage * left - rates.penalty * short_units;
}

inline double margin_of(double d, double q, const MarginRates& rates) {
  return rates.price * std::min(q, d) + rates.salvage * std::max(q - d, 0.0) -
         rates.penalty * std::max(d - q, 0.0);
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) fail(ErrorKind::invalid_argument, "kernel input and output spans differ in size");
}

NewsvendorMoments finish(const Sums& s, double squared_deviation, std::size_t n) {
  NewsvendorMoments m;
  const double inv = 1.0 / static_cast<double>(n);
  m.sales = s.sales * inv;
  m.leftover = s.leftover * inv;
  m.excess = s.excess * inv;
  m.demand = s.demand * inv;
  m.fill = s.fill * inv;
  m.margin = s.margin * inv;
  m.margin_variance = n > 1 ? squared_deviation / static_cast<double>(n - 1) : 0.0;
  m.count = n;
  return m;
}

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

void quantile_transform_serial(const TruncatedNormal& dist, std::span<const double> u,
                               std::span<double> out) {
  check_sizes(u.size(), out.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = dist.quantile(u[i]);
}

void quantile_transform(const TruncatedNormal& dist, std::span<const double> u,
                        std::span<double> out) {
  check_sizes(u.size(), out.size());
  // quantile() throws on levels outside [0,1]; exceptions must not escape the
  // parallel region, so levels are checked up front.
  for (double level : u) {
    if (!(level >= 0.0 && level <= 1.0)) {
      fail(ErrorKind::out_of_range, "quantile level outside [0,1] in transform input");
    }
  }
  const auto n = static_cast<std::int64_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = dist.quantile(u[i]);
}

NewsvendorMoments newsvendor_moments_serial(std::span<const double> demand, double q,
                                            const MarginRates& rates) {
  if (demand.empty()) fail(ErrorKind::invalid_argument, "empty demand draw set");
  Sums s;
  for (double d : demand) accumulate(s, d, q, rates);
  const double mean_margin = s.margin / static_cast<double>(demand.size());
  double sq = 0.0;
  for (double d : demand) {
    const double dev = margin_of(d, q, rates) - mean_margin;
    sq += dev * dev;
  }
  return finish(s, sq, demand.size());
}

NewsvendorMoments newsvendor_moments(std::span<const double> demand, double q,
                                     const MarginRates& rates) {
  if (demand.empty()) fail(ErrorKind::invalid_argument, "empty demand draw set");
  const std::size_t n = demand.size();
  const auto blocks = static_cast<std::int64_t>(block_count(n));
  std::vector<Sums> partial(static_cast<std::size_t>(blocks));

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    Sums s;
    for (std::size_t i = begin; i < end; ++i) accumulate(s, demand[i], q, rates);
    partial[static_cast<std::size_t>(b)] = s;
  }
  Sums total;
  for (const Sums& s : partial) total += s;

  const double mean_margin = total.margin / static_cast<double>(n);
  std::vector<double> sq_partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    double sq = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double dev = margin_of(demand[i], q, rates) - mean_margin;
      sq += dev * dev;
    }
    sq_partial[static_cast<std::size_t>(b)] = sq;
  }
  double sq = 0.0;
  for (double v : sq_partial) sq += v;
  return finish(total, sq, n);
}

void fill_rates_serial(std::span<const double> demand, double q, std::span<double> out) {
  check_sizes(demand.size(), out.size());
  for (std::size_t i = 0; i < demand.size(); ++i) out[i] = std::min(q, demand[i]) / demand[i];
}

void fill_rates(std::span<const double> demand, double q, std::span<double> out) {
  check_sizes(demand.size(), out.size());
  const auto n = static_cast<std::int64_t>(demand.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = std::min(q, demand[i]) / demand[i];
}

}  // namespace procure::kernels
