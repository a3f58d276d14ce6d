#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "procure/optimizer.hpp"
#include "procure/profit.hpp"
#include "procure/random.hpp"

namespace procure::scenarios {

/// One swept parameter. Paths: demand.{mu,sigma,lower,upper},
/// market.{price,salvage,penalty,a1,a2,a3,nu}, suppliers.beta_halfwidth.
struct Axis {
  std::string path;
  std::vector<double> values;
};

struct Range {
  std::string path;
  double lo = 0.0;
  double hi = 0.0;
};

enum class Sampler { grid, latin_hypercube };

/// Declining adoption cost and penalty-driven adaptive alpha.
struct DynamicSpec {
  std::size_t cycles = 10;
  double a3_initial = 3000.0;
  double a3_decline = 200.0;  // per cycle
  double learning_rate = 0.05;
  double target_penalty = 0.05;
  double alpha_initial = 0.2;

  /// A3(t) = A3(1) - delta * (t - 1), t starting at 1.
  double a3_at(std::size_t cycle) const;
  void validate() const;
};

struct ScenarioSpec {
  std::string id = "custom";
  Model base = baseline_model();
  Sampler sampler = Sampler::grid;
  std::vector<Axis> axes;          // grid sampler
  std::vector<Range> lhs_ranges;   // latin-hypercube sampler
  std::size_t lhs_samples = 100;
  std::size_t replications = 5000;
  std::uint64_t seed = 20240601;
  /// Every cell (and every dynamic cycle) reuses one uniform stream; the
  /// demand draws differ only through each cell's inverse CDF.
  bool common_random_numbers = true;
  SearchOptions search;
  std::optional<DynamicSpec> dynamic;

  void validate() const;
};

struct Coordinate {
  std::string name;
  double value = 0.0;
};

struct ScenarioResult {
  std::vector<Coordinate> coordinates;
  double alpha_star = 0.0;
  double q_star = 0.0;
  double expected_profit = 0.0;
  double fill_rate = 0.0;
  double penalty_rate = 0.0;
  double kkt_max_residual = 0.0;
  double std_error = 0.0;
  std::string status = "ok";
};

/// Column name for a parameter path (its last component).
std::string column_name(std::string_view path);

/// Sets one parameter on a model. suppliers.beta_halfwidth needs the
/// per-supplier uniforms used to place each beta in 0.5 +/- halfwidth.
void apply_parameter(Model& model, std::string_view path, double value,
                     std::span<const double> supplier_uniforms = {});

/// Runs every cell (or every cycle for dynamic specs) in deterministic order.
/// Cells run in parallel; per-cell failures land in `status`.
std::vector<ScenarioResult> run(const ScenarioSpec& spec);

/// Adaptive rule: clamp(alpha + eta * (observed - target) / target, 0, 1).
double adaptive_update(double alpha, double observed_penalty, double learning_rate,
                       double target_penalty);

std::vector<ScenarioResult> run_dynamic(const ScenarioSpec& spec);

/// n points stratified on each dimension: exactly one point per stratum
/// [lo + k*(hi-lo)/n, lo + (k+1)*(hi-lo)/n), strata permuted independently.
std::vector<std::vector<double>> latin_hypercube(std::span<const std::pair<double, double>> ranges,
                                                 std::size_t n, RandomStream& rng);

/// OLS of the response on standardized parameters; share_j (percent) is
/// coef_j^2 / sum_k coef_k^2. Needs >= 10 samples; throws rank_deficient for a
/// singular design or a response the parameters do not move.
std::vector<double> variance_decomposition(const std::vector<std::vector<double>>& samples,
                                           std::span<const double> responses);

/// Fill-rate summaries at q*(alpha) for each alpha, all on one shared draw set.
struct FillRateRow {
  double alpha = 0.0;
  double q = 0.0;
  FillRateSummary summary;
};
std::vector<FillRateRow> fill_rate_table(const Model& model, std::span<const double> alphas,
                                         std::size_t replications, std::uint64_t seed);

/// Built-in presets s1..s11.
const std::vector<std::string>& preset_ids();
/// Throws invalid_argument for an unknown id.
ScenarioSpec preset(std::string_view id, const Model& base = baseline_model());

}  // namespace procure::scenarios
