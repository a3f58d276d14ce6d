#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "procure/economics.hpp"
#include "procure/random.hpp"
#include "procure/truncated_normal.hpp"

namespace procure {

/// Everything the objective needs: market, supplier panel and demand law.
struct Model {
  MarketEconomics market;
  std::vector<SupplierProfile> suppliers;
  TruncatedNormal demand{50.0, 8.0, 30.0, 70.0};

  void validate() const;
};

/// Baseline: default market, illustrative suppliers, TruncatedNormal(50, 8, 30, 70).
Model baseline_model();

/// Adoption level and per-supplier order quantities.
struct Decision {
  double alpha = 0.0;
  std::vector<double> quantities;

  double total() const;
  /// Checks 0 <= alpha <= 1, q_i >= 0 and one quantity per supplier.
  void validate(std::size_t supplier_count) const;
};

/// Expected profit components in USD plus service metrics.
struct ProfitBreakdown {
  double expected_revenue = 0.0;
  double expected_salvage = 0.0;
  double expected_penalty = 0.0;
  double procurement_cost = 0.0;
  double adoption_cost = 0.0;
  double expected_profit = 0.0;
  double fill_rate_mean = 0.0;
  double penalty_rate = 0.0;  // E[(D-Q)^+] / E[D]
  double fill_rate_cvar10 = 0.0;
  double std_error = 0.0;  // zero for the closed form
};

/// Exact expectation using the truncated-normal partial expectations. Fill-rate
/// statistics use adaptive Gauss-Kronrod quadrature; they are NaN when the
/// demand support reaches zero.
ProfitBreakdown expected_profit_closed_form(const Model& model, const Decision& dec);

/// Pre-sampled demand, shared across decisions compared within one
/// optimization (common random numbers).
class DemandDraws {
 public:
  static DemandDraws generate(const TruncatedNormal& dist, std::size_t n, RandomStream& rng);
  explicit DemandDraws(std::vector<double> values) : values_(std::move(values)) {}

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// Sample-average profit over a given draw set.
ProfitBreakdown expected_profit_on_draws(const Model& model, const Decision& dec,
                                         const DemandDraws& draws);

/// Fresh n-draw Monte Carlo estimate (n >= 100). Deterministic given the stream state.
ProfitBreakdown expected_profit_monte_carlo(const Model& model, const Decision& dec,
                                            std::size_t replications, RandomStream& rng);

struct FillRateSummary {
  double mean = 0.0;
  double std_dev = 0.0;
  double cv = 0.0;
  double p10 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double prob_fill_ge_090 = 0.0;
  double cvar10 = 0.0;  // mean of the lowest 10% of fills
};

FillRateSummary summarize_fill_rates(std::span<const double> demand, double q);

/// Distribution of per-replication fill min(Q,D)/D over n >= 1000 draws.
FillRateSummary fill_rate_distribution(const TruncatedNormal& demand, double q,
                                       std::size_t replications, RandomStream& rng);

}  // namespace procure
