#include "procure/profit.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "procure/error.hpp"
#include "procure/kernels.hpp"

namespace procure {

void Model::validate() const {
  market.validate();
  if (suppliers.empty()) fail(ErrorKind::validation, "model needs at least one supplier");
  for (const auto& s : suppliers) s.validate();
}

Model baseline_model() { return Model{MarketEconomics{}, illustrative_suppliers(), {50.0, 8.0, 30.0, 70.0}}; }

double Decision::total() const { return std::accumulate(quantities.begin(), quantities.end(), 0.0); }

void Decision::validate(std::size_t supplier_count) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::out_of_range, fmt::format("decision alpha {} outside [0,1]", alpha));
  }
  if (quantities.size() != supplier_count) {
    fail(ErrorKind::invalid_argument,
         fmt::format("decision has {} quantities for {} suppliers", quantities.size(),
                     supplier_count));
  }
  for (std::size_t i = 0; i < quantities.size(); ++i) {
    if (!(quantities[i] >= 0.0) || !std::isfinite(quantities[i])) {
      fail(ErrorKind::out_of_range,
           fmt::format("order quantity q[{}] = {} must be finite and >= 0", i, quantities[i]));
    }
  }
}

namespace {

double procurement_cost(const Model& model, const Decision& dec) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.suppliers.size(); ++i) {
    total += unit_cost(model.market, model.suppliers[i], dec.alpha) * dec.quantities[i];
  }
  return total;
}

double integration_upper(const TruncatedNormal& d) {
  return std::isinf(d.upper()) ? d.mu() + 40.0 * d.sigma() : d.upper();
}

// q * integral of pdf(x)/x over [from, upper].
double tail_fill_integral(const TruncatedNormal& d, double q, double from) {
  const double hi = integration_upper(d);
  if (!(from < hi)) return 0.0;
  auto integrand = [&](double x) { return d.pdf(x) / x; };
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, from, hi, 12, 1e-13);
  return q * value;
}

void closed_form_fill(const TruncatedNormal& d, double q, ProfitBreakdown& out) {
  if (!(d.lower() > 0.0)) {
    out.fill_rate_mean = std::numeric_limits<double>::quiet_NaN();
    out.fill_rate_cvar10 = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  // Fill is 1 below q and q/D above it; it is nonincreasing in D, so the worst
  // decile of fills is the top decile of demand.
  out.fill_rate_mean = d.cdf(q) + tail_fill_integral(d, q, std::max(q, d.lower()));
  const double x90 = d.quantile(0.9);
  const double start = std::max(x90, q);
  const double full_mass = std::max(d.cdf(start) - 0.9, 0.0);
  out.fill_rate_cvar10 = (full_mass + tail_fill_integral(d, q, start)) / 0.1;
}

std::size_t decile_count(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(n))));
}

void require_positive_demand(std::span<const double> demand) {
  for (double d : demand) {
    if (!(d > 0.0)) fail(ErrorKind::invalid_argument, "fill rate needs strictly positive demand");
  }
}

double type7_percentile(std::span<const double> sorted, double level) {
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ProfitBreakdown expected_profit_closed_form(const Model& model, const Decision& dec) {
  dec.validate(model.suppliers.size());
  const auto& m = model.market;
  const auto& d = model.demand;
  const double q = dec.total();
  const double excess = d.expected_excess(q);
  const double leftover = d.expected_leftover(q);
  const double mean = d.mean();

  ProfitBreakdown out;
  out.expected_revenue = m.price * (mean - excess);
  out.expected_salvage = m.salvage * leftover;
  out.expected_penalty = m.penalty * excess;
  out.procurement_cost = procurement_cost(model, dec);
  out.adoption_cost = adoption_cost(m, dec.alpha);
  out.expected_profit = out.expected_revenue + out.expected_salvage - out.expected_penalty -
                        out.procurement_cost - out.adoption_cost;
  out.penalty_rate = excess / mean;
  closed_form_fill(d, q, out);
  return out;
}

DemandDraws DemandDraws::generate(const TruncatedNormal& dist, std::size_t n, RandomStream& rng) {
  std::vector<double> u(n);
  rng.fill_uniform(u);
  std::vector<double> values(n);
  kernels::quantile_transform(dist, u, values);
  return DemandDraws(std::move(values));
}

ProfitBreakdown expected_profit_on_draws(const Model& model, const Decision& dec,
                                         const DemandDraws& draws) {
  dec.validate(model.suppliers.size());
  if (draws.size() == 0) fail(ErrorKind::invalid_argument, "empty demand draw set");
  const auto& m = model.market;
  const double q = dec.total();
  const auto moments =
      kernels::newsvendor_moments(draws.values(), q, {m.price, m.salvage, m.penalty});

  ProfitBreakdown out;
  out.expected_revenue = m.price * moments.sales;
  out.expected_salvage = m.salvage * moments.leftover;
  out.expected_penalty = m.penalty * moments.excess;
  out.procurement_cost = procurement_cost(model, dec);
  out.adoption_cost = adoption_cost(m, dec.alpha);
  out.expected_profit = out.expected_revenue + out.expected_salvage - out.expected_penalty -
                        out.procurement_cost - out.adoption_cost;
  out.penalty_rate = moments.excess / moments.demand;
  out.std_error = std::sqrt(moments.margin_variance / static_cast<double>(moments.count));

  if (model.demand.lower() > 0.0) {
    std::vector<double> fills(draws.size());
    kernels::fill_rates(draws.values(), q, fills);
    const std::size_t k = decile_count(fills.size());
    std::nth_element(fills.begin(), fills.begin() + static_cast<std::ptrdiff_t>(k - 1), fills.end());
    std::sort(fills.begin(), fills.begin() + static_cast<std::ptrdiff_t>(k));
    out.fill_rate_cvar10 =
        std::accumulate(fills.begin(), fills.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
        static_cast<double>(k);
    out.fill_rate_mean = moments.fill;
  } else {
    out.fill_rate_mean = std::numeric_limits<double>::quiet_NaN();
    out.fill_rate_cvar10 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

ProfitBreakdown expected_profit_monte_carlo(const Model& model, const Decision& dec,
                                            std::size_t replications, RandomStream& rng) {
  if (replications < 100) {
    fail(ErrorKind::invalid_argument,
         fmt::format("Monte Carlo needs at least 100 replications (got {})", replications));
  }
  dec.validate(model.suppliers.size());
  const auto draws = DemandDraws::generate(model.demand, replications, rng);
  return expected_profit_on_draws(model, dec, draws);
}

FillRateSummary summarize_fill_rates(std::span<const double> demand, double q) {
  if (demand.size() < 2) fail(ErrorKind::invalid_argument, "fill-rate summary needs >= 2 draws");
  require_positive_demand(demand);
  std::vector<double> fills(demand.size());
  kernels::fill_rates(demand, q, fills);
  std::sort(fills.begin(), fills.end());

  const auto n = static_cast<double>(fills.size());
  FillRateSummary s;
  s.mean = std::accumulate(fills.begin(), fills.end(), 0.0) / n;
  double sq = 0.0;
  std::size_t at_least_090 = 0;
  for (double f : fills) {
    sq += (f - s.mean) * (f - s.mean);
    if (f >= 0.9) ++at_least_090;
  }
  s.std_dev = std::sqrt(sq / (n - 1.0));
  s.cv = s.std_dev / s.mean;
  s.p10 = type7_percentile(fills, 0.10);
  s.p25 = type7_percentile(fills, 0.25);
  s.p50 = type7_percentile(fills, 0.50);
  s.p75 = type7_percentile(fills, 0.75);
  s.p90 = type7_percentile(fills, 0.90);
  s.prob_fill_ge_090 = static_cast<double>(at_least_090) / n;
  const std::size_t k = decile_count(fills.size());
  s.cvar10 = std::accumulate(fills.begin(), fills.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
             static_cast<double>(k);
  return s;
}

FillRateSummary fill_rate_distribution(const TruncatedNormal& demand, double q,
                                       std::size_t replications, RandomStream& rng) {
  if (replications < 1000) {
    fail(ErrorKind::invalid_argument,
         fmt::format("fill-rate distribution needs at least 1000 replications (got {})",
                     replications));
  }
  if (!(demand.lower() > 0.0)) {
    fail(ErrorKind::invalid_argument, "fill rate needs a demand support bounded away from zero");
  }
  const auto draws = DemandDraws::generate(demand, replications, rng);
  return summarize_fill_rates(draws.values(), q);
}

}  // namespace procure
