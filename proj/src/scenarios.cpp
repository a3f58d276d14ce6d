#include "procure/scenarios.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "procure/error.hpp"
#include "procure/kernels.hpp"

namespace procure::scenarios {

namespace {

constexpr std::uint64_t kCommonStream = 0;
constexpr std::uint64_t kBetaStream = 0xbe7aULL;
constexpr std::uint64_t kLhsStream = 0x1a5ULL;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DemandParams {
  double mu;
  double sigma;
  double lower;
  double upper;
};

bool is_demand_path(std::string_view path) { return path.starts_with("demand."); }

void set_demand(DemandParams& d, std::string_view path, double value) {
  if (path == "demand.mu") d.mu = value;
  else if (path == "demand.sigma") d.sigma = value;
  else if (path == "demand.lower") d.lower = value;
  else if (path == "demand.upper") d.upper = value;
  else fail(ErrorKind::invalid_argument, fmt::format("unknown parameter path '{}'", path));
}

bool known_path(std::string_view path) {
  static const std::vector<std::string_view> paths{
      "demand.mu",     "demand.sigma",  "demand.lower", "demand.upper",
      "market.price",  "market.salvage", "market.penalty", "market.a1",
      "market.a2",     "market.a3",     "market.nu",    "suppliers.beta_halfwidth"};
  return std::find(paths.begin(), paths.end(), path) != paths.end();
}

std::vector<double> supplier_uniforms(const ScenarioSpec& spec) {
  RandomStream rng = RandomStream::derive(spec.seed, kBetaStream);
  std::vector<double> u(spec.base.suppliers.size());
  rng.fill_uniform(u);
  return u;
}

// Applies a full coordinate set; demand parameters are collected first so the
// distribution is rebuilt (and validated) once.
Model build_model(const ScenarioSpec& spec, const std::vector<Coordinate>& coords,
                  const std::vector<std::string>& paths, std::span<const double> beta_u) {
  Model model = spec.base;
  DemandParams d{model.demand.mu(), model.demand.sigma(), model.demand.lower(),
                 model.demand.upper()};
  bool demand_changed = false;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (is_demand_path(paths[k])) {
      set_demand(d, paths[k], coords[k].value);
      demand_changed = true;
    } else {
      apply_parameter(model, paths[k], coords[k].value, beta_u);
    }
  }
  if (demand_changed) model.demand = TruncatedNormal(d.mu, d.sigma, d.lower, d.upper);
  model.validate();
  return model;
}

ScenarioResult failed_row(std::vector<Coordinate> coords, const std::string& message) {
  ScenarioResult row;
  row.coordinates = std::move(coords);
  row.alpha_star = row.q_star = row.expected_profit = kNaN;
  row.fill_rate = row.penalty_rate = row.kkt_max_residual = row.std_error = kNaN;
  row.status = message;
  return row;
}

std::vector<double> uniforms_for(const ScenarioSpec& spec, std::uint64_t index) {
  RandomStream rng = RandomStream::derive(spec.seed, spec.common_random_numbers ? kCommonStream : index);
  std::vector<double> u(spec.replications);
  rng.fill_uniform(u);
  return u;
}

DemandDraws draws_for(const TruncatedNormal& demand, std::span<const double> u) {
  std::vector<double> values(u.size());
  kernels::quantile_transform(demand, u, values);
  return DemandDraws(std::move(values));
}

std::string error_status(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return fmt::format("error:{}: {}", to_string(err->kind()), err->what());
  }
  return fmt::format("error: {}", e.what());
}

}  // namespace

double DynamicSpec::a3_at(std::size_t cycle) const {
  return a3_initial - a3_decline * static_cast<double>(cycle - 1);
}

void DynamicSpec::validate() const {
  if (cycles == 0) fail(ErrorKind::validation, "dynamic.cycles must be >= 1");
  if (!(a3_at(cycles) > 0.0)) {
    fail(ErrorKind::validation,
         fmt::format("dynamic: A3 at cycle {} is {} <= 0", cycles, a3_at(cycles)));
  }
  if (!(alpha_initial >= 0.0 && alpha_initial <= 1.0)) {
    fail(ErrorKind::validation, "dynamic.alpha_initial must lie in [0,1]");
  }
  if (!(learning_rate > 0.0)) fail(ErrorKind::validation, "dynamic.learning_rate must be > 0");
  if (!(target_penalty > 0.0)) fail(ErrorKind::validation, "dynamic.target_penalty must be > 0");
}

void ScenarioSpec::validate() const {
  base.validate();
  if (replications < 100) {
    fail(ErrorKind::validation, fmt::format("replications must be >= 100 (got {})", replications));
  }
  if (dynamic) {
    dynamic->validate();
    return;
  }
  if (sampler == Sampler::grid) {
    if (axes.empty()) fail(ErrorKind::validation, "grid sampler needs at least one axis");
    for (const auto& a : axes) {
      if (!known_path(a.path)) {
        fail(ErrorKind::validation, fmt::format("unknown parameter path '{}'", a.path));
      }
      if (a.values.empty()) {
        fail(ErrorKind::validation, fmt::format("axis '{}' has no values", a.path));
      }
    }
  } else {
    if (lhs_ranges.empty()) fail(ErrorKind::validation, "latin-hypercube sampler needs ranges");
    if (lhs_samples < 2) fail(ErrorKind::validation, "latin-hypercube needs >= 2 samples");
    for (const auto& r : lhs_ranges) {
      if (!known_path(r.path)) {
        fail(ErrorKind::validation, fmt::format("unknown parameter path '{}'", r.path));
      }
      if (!(r.lo < r.hi)) {
        fail(ErrorKind::validation, fmt::format("range for '{}' needs lo < hi", r.path));
      }
    }
  }
}

std::string column_name(std::string_view path) {
  const auto dot = path.rfind('.');
  return std::string(dot == std::string_view::npos ? path : path.substr(dot + 1));
}

void apply_parameter(Model& model, std::string_view path, double value,
                     std::span<const double> supplier_uniforms) {
  auto& m = model.market;
  if (path == "market.price") m.price = value;
  else if (path == "market.salvage") m.salvage = value;
  else if (path == "market.penalty") m.penalty = value;
  else if (path == "market.a1") m.a1 = value;
  else if (path == "market.a2") m.a2 = value;
  else if (path == "market.a3") m.a3 = value;
  else if (path == "market.nu") m.nu = value;
  else if (path == "suppliers.beta_halfwidth") {
    if (supplier_uniforms.size() != model.suppliers.size()) {
      fail(ErrorKind::invalid_argument, "beta_halfwidth needs one uniform per supplier");
    }
    if (!(value >= 0.0 && value <= 0.5)) {
      fail(ErrorKind::validation, "suppliers.beta_halfwidth must lie in [0, 0.5]");
    }
    for (std::size_t i = 0; i < model.suppliers.size(); ++i) {
      model.suppliers[i].readiness = 0.5 + value * (2.0 * supplier_uniforms[i] - 1.0);
    }
  } else if (is_demand_path(path)) {
    DemandParams d{model.demand.mu(), model.demand.sigma(), model.demand.lower(),
                   model.demand.upper()};
    set_demand(d, path, value);
    model.demand = TruncatedNormal(d.mu, d.sigma, d.lower, d.upper);
  } else {
    fail(ErrorKind::invalid_argument, fmt::format("unknown parameter path '{}'", path));
  }
}

std::vector<ScenarioResult> run(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.dynamic) return run_dynamic(spec);

  std::vector<std::string> paths;
  std::vector<std::vector<Coordinate>> cells;
  if (spec.sampler == Sampler::grid) {
    for (const auto& a : spec.axes) paths.push_back(a.path);
    std::size_t total = 1;
    for (const auto& a : spec.axes) total *= a.values.size();
    cells.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
      // Row-major: the first axis varies slowest.
      std::vector<Coordinate> coords(spec.axes.size());
      std::size_t rem = flat;
      for (std::size_t k = spec.axes.size(); k-- > 0;) {
        const auto& a = spec.axes[k];
        coords[k] = {column_name(a.path), a.values[rem % a.values.size()]};
        rem /= a.values.size();
      }
      cells.push_back(std::move(coords));
    }
  } else {
    std::vector<std::pair<double, double>> ranges;
    for (const auto& r : spec.lhs_ranges) {
      paths.push_back(r.path);
      ranges.emplace_back(r.lo, r.hi);
    }
    RandomStream rng = RandomStream::derive(spec.seed, kLhsStream);
    for (const auto& point : latin_hypercube(ranges, spec.lhs_samples, rng)) {
      std::vector<Coordinate> coords;
      for (std::size_t k = 0; k < point.size(); ++k) {
        coords.push_back({column_name(spec.lhs_ranges[k].path), point[k]});
      }
      cells.push_back(std::move(coords));
    }
  }

  const auto beta_u = supplier_uniforms(spec);
  std::vector<double> shared_u;
  if (spec.common_random_numbers) shared_u = uniforms_for(spec, kCommonStream);

  std::vector<ScenarioResult> rows(cells.size());
  const auto count = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      const Model model = build_model(spec, cells[idx], paths, beta_u);
      const Optimum opt = optimize(model, spec.search);
      const auto u = spec.common_random_numbers ? shared_u : uniforms_for(spec, idx + 1);
      const auto draws = draws_for(model.demand, u);
      const auto mc = expected_profit_on_draws(model, opt.decision, draws);
      ScenarioResult row;
      row.coordinates = cells[idx];
      row.alpha_star = opt.decision.alpha;
      row.q_star = opt.decision.total();
      row.expected_profit = mc.expected_profit;
      row.fill_rate = mc.fill_rate_mean;
      row.penalty_rate = mc.penalty_rate;
      row.kkt_max_residual = opt.kkt.max_stationarity_residual();
      row.std_error = mc.std_error;
      rows[idx] = std::move(row);
    } catch (const std::exception& e) {
      rows[idx] = failed_row(cells[idx], error_status(e));
    }
  }
  return rows;
}

double adaptive_update(double alpha, double observed_penalty, double learning_rate,
                       double target_penalty) {
  const double next = alpha + learning_rate * (observed_penalty - target_penalty) / target_penalty;
  return std::clamp(next, 0.0, 1.0);
}

std::vector<ScenarioResult> run_dynamic(const ScenarioSpec& spec) {
  if (!spec.dynamic) fail(ErrorKind::validation, "run_dynamic needs a dynamic section");
  spec.validate();
  const DynamicSpec& dyn = *spec.dynamic;

  std::vector<double> shared_u;
  if (spec.common_random_numbers) shared_u = uniforms_for(spec, kCommonStream);

  std::vector<ScenarioResult> rows;
  double alpha = dyn.alpha_initial;
  for (std::size_t t = 1; t <= dyn.cycles; ++t) {
    const double a3 = dyn.a3_at(t);
    std::vector<Coordinate> coords{{"cycle", static_cast<double>(t)}, {"a3", a3}};
    Model model = spec.base;
    model.market.a3 = a3;
    // Cycles depend on the previous alpha, so they run in order.
    const auto plan = optimal_quantity_given_alpha(model, alpha);
    const Decision dec{alpha, plan.allocation};
    const auto u = spec.common_random_numbers ? shared_u : uniforms_for(spec, t);
    const auto draws = draws_for(model.demand, u);
    const auto mc = expected_profit_on_draws(model, dec, draws);
    const auto kkt = kkt_residuals(model, dec);

    ScenarioResult row;
    row.coordinates = std::move(coords);
    row.alpha_star = alpha;
    row.q_star = plan.total;
    row.expected_profit = mc.expected_profit;
    row.fill_rate = mc.fill_rate_mean;
    row.penalty_rate = mc.penalty_rate;
    row.std_error = mc.std_error;
    double worst = 0.0;
    for (double r : kkt.stationarity_q) worst = std::max(worst, std::abs(r));
    row.kkt_max_residual = worst;
    rows.push_back(std::move(row));

    alpha = adaptive_update(alpha, mc.penalty_rate, dyn.learning_rate, dyn.target_penalty);
  }
  return rows;
}

std::vector<std::vector<double>> latin_hypercube(std::span<const std::pair<double, double>> ranges,
                                                 std::size_t n, RandomStream& rng) {
  if (n < 2) fail(ErrorKind::invalid_argument, "latin hypercube needs n >= 2");
  for (const auto& [lo, hi] : ranges) {
    if (!(lo < hi)) fail(ErrorKind::invalid_argument, "latin hypercube range needs lo < hi");
  }
  std::vector<std::vector<double>> points(n, std::vector<double>(ranges.size()));
  std::vector<std::size_t> strata(n);
  for (std::size_t d = 0; d < ranges.size(); ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(strata[i], strata[rng.below(i + 1)]);
    }
    const auto [lo, hi] = ranges[d];
    const double width = (hi - lo) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double offset = rng.uniform();
      points[i][d] = lo + (static_cast<double>(strata[i]) + offset) * width;
    }
  }
  return points;
}

std::vector<double> variance_decomposition(const std::vector<std::vector<double>>& samples,
                                           std::span<const double> responses) {
  const std::size_t n = samples.size();
  if (n < 10) fail(ErrorKind::invalid_argument, "variance decomposition needs >= 10 samples");
  if (responses.size() != n) {
    fail(ErrorKind::invalid_argument, "one response per sample required");
  }
  const std::size_t p = samples.front().size();
  if (p == 0) fail(ErrorKind::invalid_argument, "variance decomposition needs >= 1 parameter");

  Eigen::MatrixXd x(n, p + 1);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].size() != p) fail(ErrorKind::invalid_argument, "ragged parameter samples");
    y(static_cast<Eigen::Index>(i)) = responses[i];
  }
  x.col(0).setOnes();
  for (std::size_t j = 0; j < p; ++j) {
    Eigen::VectorXd col(n);
    for (std::size_t i = 0; i < n; ++i) col(static_cast<Eigen::Index>(i)) = samples[i][j];
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      fail(ErrorKind::rank_deficient, fmt::format("parameter {} is constant across samples", j));
    }
    x.col(static_cast<Eigen::Index>(j + 1)) = (col.array() - mean) / sd;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < static_cast<Eigen::Index>(p + 1)) {
    fail(ErrorKind::rank_deficient, "design matrix is rank deficient");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  // Standardized columns have unit variance, so coef^2 * var(x) = coef^2.
  double total = 0.0;
  for (std::size_t j = 0; j < p; ++j) total += beta(static_cast<Eigen::Index>(j + 1)) * beta(static_cast<Eigen::Index>(j + 1));
  if (!(total > 0.0)) fail(ErrorKind::rank_deficient, "response does not vary with the parameters");
  std::vector<double> shares(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double b = beta(static_cast<Eigen::Index>(j + 1));
    shares[j] = 100.0 * b * b / total;
  }
  return shares;
}

std::vector<FillRateRow> fill_rate_table(const Model& model, std::span<const double> alphas,
                                         std::size_t replications, std::uint64_t seed) {
  if (replications < 1000) {
    fail(ErrorKind::invalid_argument, "fill-rate table needs at least 1000 replications");
  }
  RandomStream rng = RandomStream::derive(seed, kCommonStream);
  const auto draws = DemandDraws::generate(model.demand, replications, rng);
  std::vector<FillRateRow> rows;
  for (double alpha : alphas) {
    const auto plan = optimal_quantity_given_alpha(model, alpha);
    rows.push_back({alpha, plan.total, summarize_fill_rates(draws.values(), plan.total)});
  }
  return rows;
}

}  // namespace procure::scenarios
