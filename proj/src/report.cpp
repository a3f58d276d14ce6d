#include "procure/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <unistd.h>

#include "procure/error.hpp"

namespace procure::report {

namespace {

using nlohmann::ordered_json;

std::string num(double v) { return fmt::format("{:.6f}", v); }
std::string sci(double v) { return fmt::format("{:.6e}", v); }

/// Fields containing separators or quotes are quoted, quotes doubled.
std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json json_number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json breakdown_json(const ProfitBreakdown& b) {
  return ordered_json{{"expected_revenue_usd", json_number(b.expected_revenue)},
                      {"expected_salvage_usd", json_number(b.expected_salvage)},
                      {"expected_penalty_usd", json_number(b.expected_penalty)},
                      {"procurement_cost_usd", json_number(b.procurement_cost)},
                      {"adoption_cost_usd", json_number(b.adoption_cost)},
                      {"expected_profit_usd", json_number(b.expected_profit)},
                      {"fill_rate_mean", json_number(b.fill_rate_mean)},
                      {"penalty_rate", json_number(b.penalty_rate)},
                      {"fill_rate_cvar10", json_number(b.fill_rate_cvar10)}};
}

double pick(const scenarios::ScenarioResult& r, HeatmapValue v) {
  switch (v) {
    case HeatmapValue::alpha_star: return r.alpha_star;
    case HeatmapValue::q_star: return r.q_star;
    case HeatmapValue::expected_profit: return r.expected_profit;
    case HeatmapValue::fill_rate: return r.fill_rate;
  }
  return 0.0;
}

void require_two_axes(std::span<const scenarios::ScenarioResult> rows) {
  if (rows.empty()) fail(ErrorKind::invalid_argument, "heatmap needs at least one row");
  for (const auto& r : rows) {
    if (r.coordinates.size() != 2) {
      fail(ErrorKind::invalid_argument, "heatmap needs exactly two grid axes");
    }
  }
}

std::string format_tick(double v) { return fmt::format("{:g}", v); }

/// Piecewise-linear viridis approximation.
std::string colormap(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                               {59, 82, 139},
                                                               {33, 145, 140},
                                                               {94, 201, 98},
                                                               {253, 231, 37}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double pos = t * static_cast<double>(stops.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
  const double f = pos - static_cast<double>(k);
  std::array<int, 3> rgb{};
  for (std::size_t c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  }
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      fail(ErrorKind::io, fmt::format("cannot create directory '{}': {}",
                                      path.parent_path().string(), ec.message()));
    }
  }
  auto tmp = path;
  tmp += fmt::format(".tmp{}", static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      fail(ErrorKind::io, fmt::format("write to '{}' failed", tmp.string()));
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    fail(ErrorKind::io, fmt::format("cannot rename onto '{}': {}", path.string(), ec.message()));
  }
}

void OutputSet::add(std::string name, std::string content) {
  files_.emplace_back(std::move(name), std::move(content));
}

void OutputSet::commit() const {
  for (const auto& [name, content] : files_) write_atomic(directory_ / name, content);
}

std::string scenario_csv(std::span<const scenarios::ScenarioResult> rows) {
  std::string out;
  std::vector<std::string> names;
  if (!rows.empty()) {
    for (const auto& c : rows.front().coordinates) names.push_back(c.name);
  }
  for (const auto& n : names) out += csv_field(n) + ",";
  out += "alpha_star,q_star,expected_profit_usd,fill_rate,penalty_rate,std_error,"
         "kkt_max_residual,status\n";
  for (const auto& r : rows) {
    for (const auto& c : r.coordinates) out += format_tick(c.value) + ",";
    out += fmt::format("{:.2f},{},{},{},{},{},{},{}\n", r.alpha_star, num(r.q_star),
                       num(r.expected_profit), num(r.fill_rate), num(r.penalty_rate),
                       num(r.std_error), sci(r.kkt_max_residual), csv_field(r.status));
  }
  return out;
}

std::string scenario_json(const scenarios::ScenarioSpec& spec,
                          std::span<const scenarios::ScenarioResult> rows) {
  ordered_json cells = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json params = ordered_json::object();
    for (const auto& c : r.coordinates) params[c.name] = c.value;
    cells.push_back(ordered_json{{"parameters", params},
                                 {"alpha_star", json_number(r.alpha_star)},
                                 {"q_star", json_number(r.q_star)},
                                 {"expected_profit_usd", json_number(r.expected_profit)},
                                 {"fill_rate", json_number(r.fill_rate)},
                                 {"penalty_rate", json_number(r.penalty_rate)},
                                 {"std_error", json_number(r.std_error)},
                                 {"kkt_max_residual", json_number(r.kkt_max_residual)},
                                 {"status", r.status}});
  }
  const auto failed = std::count_if(rows.begin(), rows.end(),
                                    [](const auto& r) { return r.status != "ok"; });
  ordered_json doc{{"scenario", spec.id},
                   {"seed", spec.seed},
                   {"replications", spec.replications},
                   {"common_random_numbers", spec.common_random_numbers},
                   {"cells", rows.size()},
                   {"failed_cells", failed},
                   {"results", cells}};
  return doc.dump(2) + "\n";
}

std::string trajectory_csv(std::span<const scenarios::ScenarioResult> rows) {
  std::string out = "cycle,a3,alpha,q_star,expected_profit_usd,fill_rate,penalty_rate\n";
  for (const auto& r : rows) {
    if (r.coordinates.size() != 2) {
      fail(ErrorKind::invalid_argument, "trajectory rows need (cycle, a3) coordinates");
    }
    out += fmt::format("{:g},{:g},{:.6f},{},{},{},{}\n", r.coordinates[0].value,
                       r.coordinates[1].value, r.alpha_star, num(r.q_star),
                       num(r.expected_profit), num(r.fill_rate), num(r.penalty_rate));
  }
  return out;
}

std::string_view to_string(HeatmapValue value) noexcept {
  switch (value) {
    case HeatmapValue::alpha_star: return "alpha_star";
    case HeatmapValue::q_star: return "q_star";
    case HeatmapValue::expected_profit: return "expected_profit_usd";
    case HeatmapValue::fill_rate: return "fill_rate";
  }
  return "value";
}

std::string heatmap_csv(std::span<const scenarios::ScenarioResult> rows, HeatmapValue value) {
  require_two_axes(rows);
  std::string out = fmt::format("x,y,value\n");
  for (const auto& r : rows) {
    out += fmt::format("{:g},{:g},{:.6f}\n", r.coordinates[0].value, r.coordinates[1].value,
                       pick(r, value));
  }
  return out;
}

std::string heatmap_svg(std::span<const scenarios::ScenarioResult> rows, HeatmapValue value) {
  require_two_axes(rows);
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    xs.push_back(r.coordinates[0].value);
    ys.push_back(r.coordinates[1].value);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  double vmin = INFINITY, vmax = -INFINITY;
  for (const auto& r : rows) {
    const double v = pick(r, value);
    if (std::isfinite(v)) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (!std::isfinite(vmin)) vmin = vmax = 0.0;
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  constexpr int cell = 60, left = 90, top = 50;
  const int width = left + cell * static_cast<int>(xs.size()) + 140;
  const int height = top + cell * static_cast<int>(ys.size()) + 70;
  const auto& xname = rows.front().coordinates[0].name;
  const auto& yname = rows.front().coordinates[1].name;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height);
  svg += fmt::format("<text x=\"{}\" y=\"25\" font-size=\"15\">{} over {} x {}</text>\n", left,
                     to_string(value), xname, yname);
  for (const auto& r : rows) {
    const auto xi = std::lower_bound(xs.begin(), xs.end(), r.coordinates[0].value) - xs.begin();
    const auto yi = std::lower_bound(ys.begin(), ys.end(), r.coordinates[1].value) - ys.begin();
    const double v = pick(r, value);
    // y grows upward, so the largest y value sits in the top row.
    const int px = left + cell * static_cast<int>(xi);
    const int py = top + cell * (static_cast<int>(ys.size()) - 1 - static_cast<int>(yi));
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{}={:g}, "
        "{}={:g}: {:.4g}</title></rect>\n",
        px, py, cell, cell, colormap((v - vmin) / span), xname, r.coordinates[0].value, yname,
        r.coordinates[1].value, v);
  }
  const int axis_y = top + cell * static_cast<int>(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       left + cell * static_cast<int>(i) + cell / 2, axis_y + 18,
                       format_tick(xs[i]));
  }
  for (std::size_t j = 0; j < ys.size(); ++j) {
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 8,
                       top + cell * (static_cast<int>(ys.size()) - 1 - static_cast<int>(j)) +
                           cell / 2 + 4,
                       format_tick(ys[j]));
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     left + cell * static_cast<int>(xs.size()) / 2, axis_y + 42, xname);
  svg += fmt::format(
      "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
      top + cell * static_cast<int>(ys.size()) / 2, top + cell * static_cast<int>(ys.size()) / 2,
      yname);
  const int legend_x = left + cell * static_cast<int>(xs.size()) + 30;
  constexpr int steps = 20;
  const int legend_h = cell * static_cast<int>(ys.size());
  for (int k = 0; k < steps; ++k) {
    const double t = 1.0 - (static_cast<double>(k) + 0.5) / steps;
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"18\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                       legend_x, top + legend_h * k / steps,
                       static_cast<double>(legend_h) / steps + 0.5, colormap(t));
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\">{:.4g}</text>\n", legend_x + 24, top + 10, vmax);
  svg += fmt::format("<text x=\"{}\" y=\"{}\">{:.4g}</text>\n", legend_x + 24, top + legend_h,
                     vmin);
  svg += "</svg>\n";
  return svg;
}

std::string variance_csv(std::span<const std::string> names, std::span<const double> shares) {
  if (names.size() != shares.size()) {
    fail(ErrorKind::invalid_argument, "one share per parameter name required");
  }
  std::string out = "parameter,variance_share_percent\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += fmt::format("{},{:.4f}\n", csv_field(names[i]), shares[i]);
  }
  return out;
}

std::string optimum_json(const Model& model, const Optimum& optimum) {
  ordered_json allocation = ordered_json::array();
  for (std::size_t i = 0; i < model.suppliers.size(); ++i) {
    allocation.push_back(ordered_json{
        {"supplier", model.suppliers[i].id},
        {"quantity", optimum.decision.quantities[i]},
        {"unit_cost_usd", unit_cost(model.market, model.suppliers[i], optimum.decision.alpha)}});
  }
  const auto& k = optimum.kkt;
  ordered_json kkt{{"stationarity_q", k.stationarity_q},
                   {"stationarity_alpha", k.stationarity_alpha},
                   {"lambda", k.lambda},
                   {"gamma_plus", k.gamma_plus},
                   {"gamma_minus", k.gamma_minus},
                   {"complementary_slackness_max_violation",
                    k.complementary_slackness_max_violation},
                   {"kkt_max_residual", k.max_stationarity_residual()}};
  ordered_json doc{{"alpha_star", optimum.decision.alpha},
                   {"alpha_star_reported", std::round(optimum.decision.alpha * 100.0) / 100.0},
                   {"q_star", optimum.decision.total()},
                   {"allocation", allocation},
                   {"profit", breakdown_json(optimum.profit)},
                   {"kkt", kkt},
                   {"kkt_max_residual", k.max_stationarity_residual()},
                   {"alpha_grid_resolution", optimum.alpha_grid_resolution}};
  return doc.dump(2) + "\n";
}

std::string fit_csv(const fitkit::Comparison& comparison) {
  std::string out = "rank,family,parameters,free_parameters,sample_size,log_likelihood,aic,bic,"
                    "rmse,ks_statistic\n";
  std::size_t rank = 1;
  for (const auto& r : comparison.ranking) {
    std::string params;
    for (std::size_t i = 0; i < r.params.size(); ++i) {
      params += fmt::format("{}{}={:.6g}", i ? ";" : "", r.param_names[i], r.params[i]);
    }
    out += fmt::format("{},{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6e},{:.6f}\n", rank++,
                       fitkit::to_string(r.family), csv_field(params), r.free_parameters,
                       r.sample_size, r.log_likelihood, r.aic, r.bic, r.rmse, r.ks_statistic);
  }
  return out;
}

std::string fit_text(const fitkit::Comparison& comparison) {
  std::string out = fmt::format("{:<4} {:<18} {:>14} {:>14} {:>14} {:>12} {:>8}\n", "rank",
                                "family", "loglik", "aic", "bic", "rmse", "ks");
  std::size_t rank = 1;
  for (const auto& r : comparison.ranking) {
    out += fmt::format("{:<4} {:<18} {:>14.3f} {:>14.3f} {:>14.3f} {:>12.4e} {:>8.4f}\n", rank++,
                       fitkit::to_string(r.family), r.log_likelihood, r.aic, r.bic, r.rmse,
                       r.ks_statistic);
    for (const auto& note : r.notes) out += fmt::format("     note: {}\n", note);
  }
  for (const auto& f : comparison.failures) {
    out += fmt::format("     {} failed ({}): {}\n", fitkit::to_string(f.family), to_string(f.kind),
                       f.message);
  }
  return out;
}

std::string fit_json(const fitkit::Comparison& comparison) {
  ordered_json ranking = ordered_json::array();
  for (const auto& r : comparison.ranking) {
    ordered_json params = ordered_json::object();
    for (std::size_t i = 0; i < r.params.size(); ++i) params[r.param_names[i]] = r.params[i];
    ranking.push_back(ordered_json{{"family", fitkit::to_string(r.family)},
                                   {"parameters", params},
                                   {"free_parameters", r.free_parameters},
                                   {"sample_size", r.sample_size},
                                   {"log_likelihood", json_number(r.log_likelihood)},
                                   {"aic", json_number(r.aic)},
                                   {"bic", json_number(r.bic)},
                                   {"rmse", json_number(r.rmse)},
                                   {"ks_statistic", json_number(r.ks_statistic)},
                                   {"notes", r.notes}});
  }
  ordered_json failures = ordered_json::array();
  for (const auto& f : comparison.failures) {
    failures.push_back(ordered_json{{"family", fitkit::to_string(f.family)},
                                    {"error", to_string(f.kind)},
                                    {"message", f.message}});
  }
  return ordered_json{{"ranking", ranking}, {"failures", failures}}.dump(2) + "\n";
}

std::string fill_rate_csv(std::span<const scenarios::FillRateRow> rows) {
  std::string out = "alpha,q,mean,std_dev,cv,p10,p25,p50,p75,p90,prob_fill_ge_090,cvar10\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    out += fmt::format("{:.4f},{},{},{},{},{},{},{},{},{},{},{}\n", r.alpha, num(r.q), num(s.mean),
                       num(s.std_dev), num(s.cv), num(s.p10), num(s.p25), num(s.p50), num(s.p75),
                       num(s.p90), num(s.prob_fill_ge_090), num(s.cvar10));
  }
  return out;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi,
                                    std::size_t bins) {
  if (values.empty()) fail(ErrorKind::empty_data, "histogram of an empty sample");
  if (bins == 0) fail(ErrorKind::invalid_argument, "histogram needs at least one bin");
  if (!(lo < hi)) fail(ErrorKind::invalid_argument, "histogram range needs lo < hi");
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (v < lo || v > hi) {
      fail(ErrorKind::data_outside_support, fmt::format("value {} outside [{}, {}]", v, lo, hi));
    }
    auto k = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(k, bins - 1)]++;
  }
  std::vector<HistogramBin> out(bins);
  const double n = static_cast<double>(values.size());
  for (std::size_t k = 0; k < bins; ++k) {
    out[k].left = lo + width * static_cast<double>(k);
    out[k].right = k + 1 == bins ? hi : lo + width * static_cast<double>(k + 1);
    out[k].density = static_cast<double>(counts[k]) / (n * width);
  }
  return out;
}

std::string samples_csv(std::span<const double> values) {
  std::string out = "demand\n";
  out.reserve(values.size() * 20);
  for (double v : values) out += fmt::format("{:.17g}\n", v);
  return out;
}

std::string histogram_csv(std::span<const HistogramBin> bins) {
  std::string out = "bin_left,bin_right,density\n";
  for (const auto& b : bins) {
    out += fmt::format("{:.17g},{:.17g},{:.17g}\n", b.left, b.right, b.density);
  }
  return out;
}

std::vector<double> parse_demand_csv(std::string_view text, std::string_view source) {
  std::vector<double> values;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      if (end == text.size()) break;
      continue;
    }
    line = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    if (!header_seen) {
      if (line != "demand") {
        fail(ErrorKind::validation,
             fmt::format("{}:{}: expected header 'demand', got '{}'", source, line_no, line));
      }
      header_seen = true;
      continue;
    }
    if (line.find(',') != std::string::npos) {
      fail(ErrorKind::validation,
           fmt::format("{}:{}: expected a single column, got '{}'", source, line_no, line));
    }
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || !std::isfinite(v)) {
      fail(ErrorKind::validation,
           fmt::format("{}:{}: '{}' is not a finite number", source, line_no, line));
    }
    values.push_back(v);
  }
  if (values.empty()) fail(ErrorKind::empty_data, fmt::format("{}: no demand values", source));
  return values;
}

std::vector<double> read_demand_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_demand_csv(buffer.str(), path.string());
}

}  // namespace procure::report
