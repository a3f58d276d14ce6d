#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procure/optimizer.hpp"
#include "procure/profit.hpp"
#include "procure/scenarios.hpp"

namespace procure::config {

enum class OutputFormat { csv, json };

OutputFormat parse_format(std::string_view name);
std::string_view to_string(OutputFormat format) noexcept;

struct RunSettings {
  std::uint64_t seed = 20240601;
  std::size_t replications = 5000;
  std::filesystem::path out = "out";
  std::vector<OutputFormat> formats{OutputFormat::csv};
};

/// Full contents of a configuration file. `scenario` holds either a preset id
/// or an inline scenario definition when the file carries one.
struct RunConfig {
  Model model = baseline_model();
  RunSettings run;
  SearchOptions search;
  std::optional<std::string> scenario_preset;
  std::optional<scenarios::ScenarioSpec> scenario;
};

/// Parses configuration text. Validation failures throw Error(validation) with
/// a "source:line:column: field: reason" message.
RunConfig parse(std::string_view text, std::string_view source = "<config>");

/// Reads and parses a file; throws Error(io) if it cannot be read.
RunConfig load(const std::filesystem::path& path);

/// Scenario spec for `config`: the inline scenario if present, else the named
/// preset applied to the configured model. Run settings fill replications,
/// seed and optimizer options.
scenarios::ScenarioSpec resolve_scenario(const RunConfig& config,
                                         std::optional<std::string_view> preset_id);

}  // namespace procure::config
