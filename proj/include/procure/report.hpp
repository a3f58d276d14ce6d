#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procure/fitkit.hpp"
#include "procure/optimizer.hpp"
#include "procure/scenarios.hpp"

namespace procure::report {

/// Writes through a temporary sibling file and a rename, so readers never see
/// a partial file. Creates parent directories. Throws Error(io).
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Files staged in memory and committed together once everything rendered.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path directory) : directory_(std::move(directory)) {}
  void add(std::string name, std::string content);
  void commit() const;
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::filesystem::path directory_;
  std::vector<std::pair<std::string, std::string>> files_;
};

/// Fixed column order: cell parameters, alpha_star, q_star, expected_profit_usd,
/// fill_rate, penalty_rate, std_error, kkt_max_residual, status.
std::string scenario_csv(std::span<const scenarios::ScenarioResult> rows);
std::string scenario_json(const scenarios::ScenarioSpec& spec,
                          std::span<const scenarios::ScenarioResult> rows);

/// Per-cycle alpha at full precision for dynamic runs.
std::string trajectory_csv(std::span<const scenarios::ScenarioResult> rows);

enum class HeatmapValue { alpha_star, q_star, expected_profit, fill_rate };
std::string_view to_string(HeatmapValue value) noexcept;

/// Long-format (x, y, value) rows for two-axis grids; x is the first axis.
std::string heatmap_csv(std::span<const scenarios::ScenarioResult> rows, HeatmapValue value);
std::string heatmap_svg(std::span<const scenarios::ScenarioResult> rows, HeatmapValue value);

std::string variance_csv(std::span<const std::string> names, std::span<const double> shares);

std::string optimum_json(const Model& model, const Optimum& optimum);

std::string fit_csv(const fitkit::Comparison& comparison);
std::string fit_text(const fitkit::Comparison& comparison);
std::string fit_json(const fitkit::Comparison& comparison);

std::string fill_rate_csv(std::span<const scenarios::FillRateRow> rows);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  double density = 0.0;
};

/// Equal-width bins over [lo, hi]; densities integrate to one.
std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi,
                                    std::size_t bins = 40);

std::string samples_csv(std::span<const double> values);
std::string histogram_csv(std::span<const HistogramBin> bins);

/// Reads a single-column CSV with header `demand`. Throws Error(validation)
/// naming the row for malformed values, Error(empty_data) when there are none.
std::vector<double> read_demand_csv(const std::filesystem::path& path);
std::vector<double> parse_demand_csv(std::string_view text, std::string_view source);

}  // namespace procure::report
