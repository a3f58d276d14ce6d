#pragma once

#include <cstddef>
#include <vector>

#include "procure/profit.hpp"

namespace procure {

/// Inner solution for a fixed adoption level: total order and its allocation.
struct QuantityPlan {
  double total = 0.0;
  std::vector<double> allocation;
  std::size_t supplier = 0;  // index of the cheapest supplier
  double unit_cost = 0.0;    // its effective cost
  double fractile = 0.0;     // (p + r - c) / (p + r - s) before clamping
};

/// Critical-fractile order quantity. All of it goes to the cheapest supplier
/// (ties to the lowest id). Fractile exactly 0 orders the lower bound; a
/// negative fractile orders nothing. Throws degenerate_economics when
/// p + r - s <= 0 or when a unit cost falls below salvage (unbounded order).
QuantityPlan optimal_quantity_given_alpha(const Model& model, double alpha);

struct KKTReport {
  std::vector<double> stationarity_q;  // per supplier, multiplier included
  double stationarity_alpha = 0.0;
  std::vector<double> lambda;  // q_i >= 0 multipliers
  double gamma_plus = 0.0;     // alpha >= 0 multiplier
  double gamma_minus = 0.0;    // alpha <= 1 multiplier
  double complementary_slackness_max_violation = 0.0;

  double max_stationarity_residual() const;
};

/// Evaluates the first-order system at an arbitrary feasible decision. The
/// multiplier of a bound is only engaged when the decision sits on that bound,
/// so a non-optimal decision shows up as a nonzero stationarity residual.
KKTReport kkt_residuals(const Model& model, const Decision& dec);

struct SearchOptions {
  double grid_step = 0.01;
  bool refine = true;
  double golden_tolerance = 1e-6;
  /// When set, the outer search compares adoption levels on this shared draw
  /// set instead of the closed form.
  const DemandDraws* common_draws = nullptr;
};

struct Optimum {
  Decision decision;
  ProfitBreakdown profit;
  KKTReport kkt;
  double alpha_grid_resolution = 0.01;
};

/// Profit of (alpha, q*(alpha)) under the chosen objective.
double concentrated_profit(const Model& model, double alpha, const SearchOptions& options = {});

/// Grid search over alpha followed by golden-section refinement on the
/// bracketing cells and, for the closed form, a bisection polish on
/// A1*Q*(alpha) - psi'(alpha).
Optimum optimize(const Model& model, const SearchOptions& options = {});

/// Smallest A3 in [lo, hi] (to `resolution`) whose optimum reports alpha* below
/// half a grid step. Throws no_threshold_in_range if adoption persists at hi.
double adoption_threshold(const Model& model, double lo, double hi, double resolution = 1.0,
                          const SearchOptions& options = {});

}  // namespace procure
