#pragma once

#include <array>
#include <variant>
#include <vector>

namespace procure {

/// Five normalized capability scores (each in [0,1]) and their weights.
struct ReadinessComponents {
  double smart_contract = 0.0;
  double erp = 0.0;
  double cloud = 0.0;
  double human_capital = 0.0;
  double security = 0.0;
  std::array<double, 5> weights{0.28, 0.27, 0.20, 0.15, 0.10};

  std::array<double, 5> scores() const {
    return {smart_contract, erp, cloud, human_capital, security};
  }
};

/// Weighted readiness index. Throws weight_sum if the weights do not sum to 1
/// within 1e-12, out_of_range for a score or weight outside its domain.
double composite_beta(const ReadinessComponents& rc);

struct SupplierProfile {
  int id = 0;
  double base_cost = 0.0;  // USD/unit with no smart contract adoption
  std::variant<double, ReadinessComponents> readiness = 0.0;

  double beta() const;
  void validate() const;
};

/// Market-level prices and cost coefficients, all in USD.
struct MarketEconomics {
  double price = 120.0;
  double salvage = 30.0;
  double penalty = 40.0;
  double a1 = 5.0;     // unit cost reduction per unit of alpha
  double a2 = 8.0;     // unit cost reduction per unit of beta
  double a3 = 2000.0;  // adoption cost scale
  double nu = 1.5;     // adoption cost exponent

  void validate() const;
};

/// Effective unit cost c0 - A1*alpha - A2*beta. Throws negative_cost if <= 0.
double unit_cost(const MarketEconomics& m, const SupplierProfile& sp, double alpha);

/// A3 * alpha^nu.
double adoption_cost(const MarketEconomics& m, double alpha);

/// A3 * nu * alpha^(nu-1).
double adoption_cost_derivative(const MarketEconomics& m, double alpha);

/// The three suppliers of the illustrative cost table (c0 = 100/102/98,
/// beta = 0.2/0.5/0.7).
std::vector<SupplierProfile> illustrative_suppliers();

}  // namespace procure
