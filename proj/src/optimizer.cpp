#include "procure/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "procure/error.hpp"

namespace procure {

QuantityPlan optimal_quantity_given_alpha(const Model& model, double alpha) {
  const auto& m = model.market;
  const double denom = m.price + m.penalty - m.salvage;
  if (!(denom > 0.0)) {
    fail(ErrorKind::degenerate_economics,
         fmt::format("p + r - s = {} must be positive", denom));
  }
  if (model.suppliers.empty()) fail(ErrorKind::validation, "model needs at least one supplier");

  QuantityPlan plan;
  plan.unit_cost = std::numeric_limits<double>::infinity();
  int best_id = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < model.suppliers.size(); ++i) {
    const double c = unit_cost(m, model.suppliers[i], alpha);
    const int id = model.suppliers[i].id;
    if (c < plan.unit_cost || (c == plan.unit_cost && id < best_id)) {
      plan.unit_cost = c;
      plan.supplier = i;
      best_id = id;
    }
  }
  if (plan.unit_cost < m.salvage) {
    fail(ErrorKind::degenerate_economics,
         fmt::format("unit cost {} below salvage {}: ordering is unbounded", plan.unit_cost,
                     m.salvage));
  }

  plan.fractile = (m.price + m.penalty - plan.unit_cost) / denom;
  if (plan.fractile < 0.0) {
    plan.total = 0.0;
  } else {
    plan.total = model.demand.quantile(std::min(plan.fractile, 1.0));
  }
  plan.allocation.assign(model.suppliers.size(), 0.0);
  plan.allocation[plan.supplier] = plan.total;
  return plan;
}

double KKTReport::max_stationarity_residual() const {
  double worst = std::abs(stationarity_alpha);
  for (double r : stationarity_q) worst = std::max(worst, std::abs(r));
  return worst;
}

KKTReport kkt_residuals(const Model& model, const Decision& dec) {
  dec.validate(model.suppliers.size());
  const auto& m = model.market;
  const double q = dec.total();
  // Continuous demand: P(D >= Q) = P(D > Q) = 1 - F(Q).
  const double above = model.demand.survival(q);
  const double below = model.demand.cdf(q);

  KKTReport report;
  const std::size_t n = model.suppliers.size();
  report.stationarity_q.resize(n);
  report.lambda.resize(n);
  double slack = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double grad = (m.price + m.penalty) * above + m.salvage * below -
                        unit_cost(m, model.suppliers[i], dec.alpha);
    const double lambda = dec.quantities[i] == 0.0 ? std::max(0.0, -grad) : 0.0;
    report.lambda[i] = lambda;
    report.stationarity_q[i] = grad + lambda;
    slack = std::max(slack, lambda * dec.quantities[i]);
  }

  const double grad_alpha = m.a1 * q - adoption_cost_derivative(m, dec.alpha);
  report.gamma_plus = dec.alpha == 0.0 ? std::max(0.0, -grad_alpha) : 0.0;
  report.gamma_minus = dec.alpha == 1.0 ? std::max(0.0, grad_alpha) : 0.0;
  report.stationarity_alpha = grad_alpha + report.gamma_plus - report.gamma_minus;
  slack = std::max({slack, report.gamma_plus * dec.alpha, report.gamma_minus * (1.0 - dec.alpha)});
  report.complementary_slackness_max_violation = slack;
  return report;
}

namespace {

Decision decision_at(const Model& model, double alpha) {
  auto plan = optimal_quantity_given_alpha(model, alpha);
  return Decision{alpha, std::move(plan.allocation)};
}

// d/dalpha of Pi(alpha, q*(alpha)); q* is optimal so only the direct term remains.
double envelope_slope(const Model& model, double alpha) {
  const auto plan = optimal_quantity_given_alpha(model, alpha);
  return model.market.a1 * plan.total - adoption_cost_derivative(model.market, alpha);
}

double golden_section_max(const Model& model, const SearchOptions& options, double lo, double hi) {
  constexpr double inv_phi = 0.61803398874989484820;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = concentrated_profit(model, x1, options);
  double f2 = concentrated_profit(model, x2, options);
  while (hi - lo > options.golden_tolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = concentrated_profit(model, x2, options);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = concentrated_profit(model, x1, options);
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_slope(const Model& model, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (envelope_slope(model, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double concentrated_profit(const Model& model, double alpha, const SearchOptions& options) {
  const Decision dec = decision_at(model, alpha);
  if (options.common_draws != nullptr) {
    return expected_profit_on_draws(model, dec, *options.common_draws).expected_profit;
  }
  return expected_profit_closed_form(model, dec).expected_profit;
}

Optimum optimize(const Model& model, const SearchOptions& options) {
  model.validate();
  if (!(options.grid_step > 0.0 && options.grid_step <= 1.0)) {
    fail(ErrorKind::invalid_argument,
         fmt::format("grid_step {} must lie in (0, 1]", options.grid_step));
  }
  const auto cells = static_cast<std::size_t>(std::ceil(1.0 / options.grid_step - 1e-9));
  auto grid_alpha = [&](std::size_t k) {
    return std::min(1.0, static_cast<double>(k) * options.grid_step);
  };

  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= cells; ++k) {
    const double v = concentrated_profit(model, grid_alpha(k), options);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  double alpha = grid_alpha(best);

  if (options.refine) {
    const double lo = grid_alpha(best == 0 ? 0 : best - 1);
    const double hi = grid_alpha(std::min(best + 1, cells));
    const double golden = golden_section_max(model, options, lo, hi);
    alpha = golden;
    if (concentrated_profit(model, lo, options) > concentrated_profit(model, alpha, options)) {
      alpha = lo;
    }
    if (concentrated_profit(model, hi, options) > concentrated_profit(model, alpha, options)) {
      alpha = hi;
    }
    if (options.common_draws == nullptr) {
      const double slope_lo = envelope_slope(model, lo);
      const double slope_hi = envelope_slope(model, hi);
      if (hi == 1.0 && slope_hi >= 0.0) {
        alpha = 1.0;
      } else if (lo == 0.0 && slope_lo <= 0.0) {
        alpha = 0.0;
      } else if (slope_lo > 0.0 && slope_hi < 0.0) {
        alpha = bisect_slope(model, lo, hi);
      }
    }
  }

  Optimum out;
  out.decision = decision_at(model, alpha);
  out.profit = options.common_draws != nullptr
                   ? expected_profit_on_draws(model, out.decision, *options.common_draws)
                   : expected_profit_closed_form(model, out.decision);
  out.kkt = kkt_residuals(model, out.decision);
  out.alpha_grid_resolution = options.grid_step;
  return out;
}

double adoption_threshold(const Model& model, double lo, double hi, double resolution,
                          const SearchOptions& options) {
  if (!(lo < hi) || !(lo > 0.0)) {
    fail(ErrorKind::invalid_argument,
         fmt::format("threshold range needs 0 < lo < hi (lo={}, hi={})", lo, hi));
  }
  if (!(resolution > 0.0)) fail(ErrorKind::invalid_argument, "threshold resolution must be > 0");
  const double cutoff = 0.5 * options.grid_step;
  auto adopts = [&](double a3) {
    Model m = model;
    m.market.a3 = a3;
    return optimize(m, options).decision.alpha >= cutoff;
  };
  if (adopts(hi)) {
    fail(ErrorKind::no_threshold_in_range,
         fmt::format("alpha* stays >= {} at A3 = {}; no threshold in [{}, {}]", cutoff, hi, lo, hi));
  }
  if (!adopts(lo)) return lo;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (adopts(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace procure
