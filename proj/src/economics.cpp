#include "procure/economics.hpp"

#include <cmath>
#include <fmt/format.h>

#include "procure/error.hpp"

namespace procure {

namespace {

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::out_of_range, fmt::format("adoption level {} outside [0,1]", alpha));
  }
}

}  // namespace

double composite_beta(const ReadinessComponents& rc) {
  const auto scores = rc.scores();
  double weight_sum = 0.0;
  double beta = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!(scores[k] >= 0.0 && scores[k] <= 1.0)) {
      fail(ErrorKind::out_of_range,
           fmt::format("readiness component {} = {} outside [0,1]", k, scores[k]));
    }
    if (!(rc.weights[k] >= 0.0)) {
      fail(ErrorKind::out_of_range, fmt::format("readiness weight {} is negative", k));
    }
    weight_sum += rc.weights[k];
    beta += rc.weights[k] * scores[k];
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    fail(ErrorKind::weight_sum, fmt::format("readiness weights sum to {:.15g}, not 1", weight_sum));
  }
  return beta;
}

double SupplierProfile::beta() const {
  if (const double* b = std::get_if<double>(&readiness)) return *b;
  return composite_beta(std::get<ReadinessComponents>(readiness));
}

void SupplierProfile::validate() const {
  if (!(base_cost > 0.0) || !std::isfinite(base_cost)) {
    fail(ErrorKind::validation,
         fmt::format("supplier {}: base_cost must be positive (got {})", id, base_cost));
  }
  const double b = beta();
  if (!(b >= 0.0 && b <= 1.0)) {
    fail(ErrorKind::validation, fmt::format("supplier {}: beta {} outside [0,1]", id, b));
  }
}

void MarketEconomics::validate() const {
  if (!(salvage >= 0.0) || !(salvage < price)) {
    fail(ErrorKind::validation,
         fmt::format("market: need 0 <= salvage < price (salvage={}, price={})", salvage, price));
  }
  if (!(penalty >= 0.0)) fail(ErrorKind::validation, "market: penalty must be >= 0");
  if (!(a1 > 0.0)) fail(ErrorKind::validation, "market: a1 must be > 0");
  if (!(a2 > 0.0)) fail(ErrorKind::validation, "market: a2 must be > 0");
  if (!(a3 > 0.0)) fail(ErrorKind::validation, "market: a3 must be > 0");
  if (!(nu > 1.0)) fail(ErrorKind::validation, "market: nu must be > 1");
}

double unit_cost(const MarketEconomics& m, const SupplierProfile& sp, double alpha) {
  require_alpha(alpha);
  const double c = sp.base_cost - m.a1 * alpha - m.a2 * sp.beta();
  if (!(c > 0.0)) {
    fail(ErrorKind::negative_cost,
         fmt::format("supplier {}: effective unit cost {} <= 0 at alpha={}", sp.id, c, alpha));
  }
  return c;
}

double adoption_cost(const MarketEconomics& m, double alpha) {
  require_alpha(alpha);
  return m.a3 * std::pow(alpha, m.nu);
}

double adoption_cost_derivative(const MarketEconomics& m, double alpha) {
  require_alpha(alpha);
  return m.a3 * m.nu * std::pow(alpha, m.nu - 1.0);
}

std::vector<SupplierProfile> illustrative_suppliers() {
  return {{1, 100.0, 0.20}, {2, 102.0, 0.50}, {3, 98.0, 0.70}};
}

}  // namespace procure
