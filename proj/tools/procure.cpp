#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "procure/config.hpp"
#include "procure/error.hpp"
#include "procure/fitkit.hpp"
#include "procure/optimizer.hpp"
#include "procure/report.hpp"
#include "procure/scenarios.hpp"

namespace {

using namespace procure;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return kExitIo;
    case ErrorKind::nonconvergence:
    case ErrorKind::rank_deficient:
    case ErrorKind::no_threshold_in_range: return kExitRuntime;
    default: return kExitValidation;
  }
}

void print_error(std::string_view kind, std::string_view message) {
  nlohmann::json line{{"error", kind}, {"message", message}};
  std::cerr << line.dump() << "\n";
}

/// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<std::string> out;
  std::vector<std::string> formats;
  int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "Configuration file (YAML)");
  cmd->add_option("--seed", c.seed, "Master random seed");
  cmd->add_option("--replications", c.replications, "Monte Carlo replications")
      ->check(CLI::Range(std::size_t{100}, std::size_t{100000000}));
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--format", c.formats, "Output format(s): csv, json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", c.jobs, "Worker threads (results do not depend on it)")
      ->check(CLI::NonNegativeNumber);
}

config::RunConfig resolve(const Common& c) {
  config::RunConfig cfg = c.config_path.empty() ? config::RunConfig{} : config::load(c.config_path);
  if (c.seed) cfg.run.seed = *c.seed;
  if (c.replications) cfg.run.replications = *c.replications;
  if (c.out) cfg.run.out = *c.out;
  if (!c.formats.empty()) {
    cfg.run.formats.clear();
    for (const auto& f : c.formats) cfg.run.formats.push_back(config::parse_format(f));
  }
  if (c.jobs > 0) omp_set_num_threads(c.jobs);
  return cfg;
}

bool wants(const config::RunConfig& cfg, config::OutputFormat f) {
  return std::find(cfg.run.formats.begin(), cfg.run.formats.end(), f) != cfg.run.formats.end();
}

int cmd_optimize(const Common& c) {
  const auto cfg = resolve(c);
  const Optimum opt = optimize(cfg.model, cfg.search);
  RandomStream rng(cfg.run.seed);
  const auto mc =
      expected_profit_monte_carlo(cfg.model, opt.decision, cfg.run.replications, rng);

  auto doc = nlohmann::ordered_json::parse(report::optimum_json(cfg.model, opt));
  doc["monte_carlo"] = {{"replications", cfg.run.replications},
                        {"seed", cfg.run.seed},
                        {"expected_profit_usd", mc.expected_profit},
                        {"std_error", mc.std_error},
                        {"fill_rate_mean", mc.fill_rate_mean},
                        {"penalty_rate", mc.penalty_rate}};
  report::OutputSet out(cfg.run.out);
  out.add("optimum.json", doc.dump(2) + "\n");
  out.commit();
  fmt::print("alpha*={:.4f} Q*={:.4f} expected_profit_usd={:.2f} kkt_max_residual={:.3e} -> {}\n",
             opt.decision.alpha, opt.decision.total(), opt.profit.expected_profit,
             opt.kkt.max_stationarity_residual(), (cfg.run.out / "optimum.json").string());
  return 0;
}

int cmd_scenario(const Common& c, const std::optional<std::string>& preset_id,
                 const std::string& spec_path) {
  Common effective = c;
  if (!spec_path.empty()) {
    if (!c.config_path.empty()) {
      throw Error(ErrorKind::validation, "give either --spec or --config, not both");
    }
    effective.config_path = spec_path;
  }
  const auto cfg = resolve(effective);
  if (!spec_path.empty() && !cfg.scenario && !cfg.scenario_preset && !preset_id) {
    throw Error(ErrorKind::validation,
                fmt::format("{}: scenario: missing scenario definition", spec_path));
  }
  std::optional<std::string_view> id;
  if (preset_id) id = *preset_id;
  const auto spec = config::resolve_scenario(cfg, id);
  const auto rows = scenarios::run(spec);

  report::OutputSet out(cfg.run.out);
  if (wants(cfg, config::OutputFormat::csv)) out.add("results.csv", report::scenario_csv(rows));
  if (wants(cfg, config::OutputFormat::json)) {
    out.add("results.json", report::scenario_json(spec, rows));
  }
  const bool all_ok =
      std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == "ok"; });
  if (spec.dynamic) {
    out.add("trajectory.csv", report::trajectory_csv(rows));
  } else if (spec.sampler == scenarios::Sampler::grid && spec.axes.size() == 2 && all_ok) {
    using report::HeatmapValue;
    out.add("heatmap.csv", report::heatmap_csv(rows, HeatmapValue::alpha_star));
    out.add("heatmap.svg", report::heatmap_svg(rows, HeatmapValue::alpha_star));
    out.add("heatmap_q_star.csv", report::heatmap_csv(rows, HeatmapValue::q_star));
    out.add("heatmap_q_star.svg", report::heatmap_svg(rows, HeatmapValue::q_star));
    out.add("heatmap_expected_profit_usd.csv",
            report::heatmap_csv(rows, HeatmapValue::expected_profit));
  } else if (spec.sampler == scenarios::Sampler::latin_hypercube) {
    std::vector<std::vector<double>> samples;
    std::vector<double> response;
    for (const auto& r : rows) {
      if (r.status != "ok") continue;
      std::vector<double> point;
      for (const auto& coord : r.coordinates) point.push_back(coord.value);
      samples.push_back(std::move(point));
      response.push_back(r.alpha_star);
    }
    const auto shares = scenarios::variance_decomposition(samples, response);
    std::vector<std::string> names;
    for (const auto& range : spec.lhs_ranges) names.push_back(scenarios::column_name(range.path));
    out.add("variance_decomposition.csv", report::variance_csv(names, shares));
  }
  out.commit();

  const auto failed = std::count_if(rows.begin(), rows.end(),
                                    [](const auto& r) { return r.status != "ok"; });
  fmt::print("scenario {}: {} rows ({} failed) -> {}\n", spec.id, rows.size(), failed,
             cfg.run.out.string());
  return 0;
}

int cmd_fit(const Common& c, const std::string& data_path, const std::vector<std::string>& names,
            std::optional<double> lower, std::optional<double> upper) {
  const auto cfg = resolve(c);
  if (lower.has_value() != upper.has_value()) {
    throw Error(ErrorKind::validation, "--lower and --upper must be given together");
  }
  std::vector<fitkit::Family> families;
  for (const auto& n : names) families.push_back(fitkit::parse_family(n));
  if (families.empty()) families = fitkit::all_families();
  const auto data = report::read_demand_csv(data_path);
  std::optional<fitkit::Bounds> bounds;
  if (lower) bounds = fitkit::Bounds{*lower, *upper};
  const auto comparison = fitkit::compare(data, families, bounds);

  report::OutputSet out(cfg.run.out);
  if (wants(cfg, config::OutputFormat::csv)) out.add("fit.csv", report::fit_csv(comparison));
  if (wants(cfg, config::OutputFormat::json)) out.add("fit.json", report::fit_json(comparison));
  out.commit();
  fmt::print("{}", report::fit_text(comparison));
  return comparison.ranking.empty() ? kExitRuntime : 0;
}

int cmd_sample(const Common& c, std::size_t n, std::optional<double> mu,
               std::optional<double> sigma, std::optional<double> lower,
               std::optional<double> upper) {
  const auto cfg = resolve(c);
  const auto& d = cfg.model.demand;
  const TruncatedNormal dist(mu.value_or(d.mu()), sigma.value_or(d.sigma()),
                             lower.value_or(d.lower()), upper.value_or(d.upper()));
  if (n < 1) throw Error(ErrorKind::validation, "--n must be >= 1");
  RandomStream rng(cfg.run.seed);
  const auto draws = DemandDraws::generate(dist, n, rng);
  const auto values = draws.values();
  double lo = dist.lower(), hi = dist.upper();
  if (!std::isfinite(lo)) lo = *std::min_element(values.begin(), values.end());
  if (!std::isfinite(hi)) hi = *std::max_element(values.begin(), values.end());
  if (!(lo < hi)) hi = lo + 1.0;

  report::OutputSet out(cfg.run.out);
  out.add("samples.csv", report::samples_csv(values));
  out.add("histogram.csv", report::histogram_csv(report::histogram(values, lo, hi)));
  out.commit();
  fmt::print("{} draws from TruncatedNormal({}, {}, {}, {}) -> {}\n", n, dist.mu(), dist.sigma(),
             dist.lower(), dist.upper(), cfg.run.out.string());
  return 0;
}

int cmd_fill_rates(const Common& c, const std::vector<double>& alphas) {
  const auto cfg = resolve(c);
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorKind::validation, fmt::format("--alphas: {} is outside [0,1]", a));
    }
  }
  const std::size_t n = std::max<std::size_t>(cfg.run.replications, 1000);
  const auto rows = scenarios::fill_rate_table(cfg.model, alphas, n, cfg.run.seed);
  report::OutputSet out(cfg.run.out);
  out.add("fill_rates.csv", report::fill_rate_csv(rows));
  out.commit();
  for (const auto& r : rows) {
    fmt::print("alpha={:.2f} Q={:.3f} mean={:.4f} P(fill>=0.9)={:.4f} cvar10={:.4f}\n", r.alpha,
               r.q, r.summary.mean, r.summary.prob_fill_ge_090, r.summary.cvar10);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procurement planning under truncated-normal demand with smart contract adoption"};
  app.require_subcommand(1);

  Common common;

  auto* optimize_cmd = app.add_subcommand("optimize", "Optimal adoption level and order quantity");
  add_common(optimize_cmd, common);

  auto* scenario_cmd = app.add_subcommand("scenario", "Run a preset (s1..s11) or a spec file");
  add_common(scenario_cmd, common);
  std::optional<std::string> preset_id;
  std::string spec_path;
  scenario_cmd->add_option("preset", preset_id, "Preset id s1..s11");
  scenario_cmd->add_option("--spec", spec_path, "Scenario spec file (YAML)");

  auto* fit_cmd = app.add_subcommand("fit", "Fit candidate demand distributions to data");
  add_common(fit_cmd, common);
  std::string data_path;
  std::vector<std::string> family_names;
  std::optional<double> fit_lower, fit_upper;
  fit_cmd->add_option("data", data_path, "Single-column CSV with header 'demand'")->required();
  fit_cmd->add_option("--families", family_names,
                      "truncated-normal, pareto, negative-binomial (default: all)")
      ->delimiter(',');
  fit_cmd->add_option("--lower", fit_lower, "Known lower truncation bound");
  fit_cmd->add_option("--upper", fit_upper, "Known upper truncation bound");

  auto* sample_cmd = app.add_subcommand("sample", "Draw demand samples and a 40-bin histogram");
  add_common(sample_cmd, common);
  std::size_t sample_n = 100000;
  std::optional<double> s_mu, s_sigma, s_lower, s_upper;
  sample_cmd->add_option("-n,--n", sample_n, "Number of draws");
  sample_cmd->add_option("--mu", s_mu);
  sample_cmd->add_option("--sigma", s_sigma);
  sample_cmd->add_option("--lower", s_lower);
  sample_cmd->add_option("--upper", s_upper);

  auto* fill_cmd = app.add_subcommand("fill-rates", "Fill-rate distribution at q*(alpha)");
  add_common(fill_cmd, common);
  std::vector<double> alphas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  fill_cmd->add_option("--alphas", alphas, "Adoption levels")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitValidation;
  }

  try {
    if (*optimize_cmd) return cmd_optimize(common);
    if (*scenario_cmd) return cmd_scenario(common, preset_id, spec_path);
    if (*fit_cmd) return cmd_fit(common, data_path, family_names, fit_lower, fit_upper);
    if (*sample_cmd) return cmd_sample(common, sample_n, s_mu, s_sigma, s_lower, s_upper);
    if (*fill_cmd) return cmd_fill_rates(common, alphas);
  } catch (const Error& e) {
    print_error(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return kExitRuntime;
  }
  return 0;
}
