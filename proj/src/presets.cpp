#include <fmt/format.h>

#include "procure/error.hpp"
#include "procure/scenarios.hpp"

namespace procure::scenarios {

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"s1", "s2", "s3", "s4",  "s5", "s6",
                                            "s7", "s8", "s9", "s10", "s11"};
  return ids;
}

ScenarioSpec preset(std::string_view id, const Model& base) {
  ScenarioSpec spec;
  spec.id = std::string(id);
  spec.base = base;
  const std::vector<double> sigmas{5.0, 8.0, 12.0, 15.0};
  const std::vector<double> uppers{65.0, 70.0, 75.0, 80.0};
  const std::vector<double> a3_low{500.0, 2000.0, 4000.0};

  if (id == "s1") {
    spec.axes = {{"demand.sigma", sigmas}};
  } else if (id == "s2") {
    spec.axes = {{"demand.upper", uppers}};
  } else if (id == "s3") {
    spec.axes = {{"demand.sigma", sigmas}, {"demand.upper", uppers}};
  } else if (id == "s4") {
    spec.axes = {{"suppliers.beta_halfwidth", {0.1, 0.2, 0.4}}};
  } else if (id == "s5") {
    spec.axes = {{"market.a3", {500.0, 1000.0, 2000.0, 3000.0, 4000.0}}};
  } else if (id == "s6") {
    spec.axes = {{"market.a1", {2.0, 3.5, 5.0}}, {"market.a3", a3_low}};
  } else if (id == "s7") {
    spec.axes = {{"demand.sigma", {5.0, 8.0, 12.0}}, {"market.a3", a3_low}};
  } else if (id == "s8") {
    spec.axes = {{"market.a3", {10000.0, 20000.0, 40000.0, 60000.0, 80000.0}}};
  } else if (id == "s9") {
    spec.sampler = Sampler::latin_hypercube;
    spec.lhs_samples = 100;
    spec.lhs_ranges = {{"demand.sigma", 5.0, 15.0},
                       {"demand.upper", 65.0, 80.0},
                       {"market.a3", 500.0, 4000.0}};
  } else if (id == "s10") {
    spec.axes = {{"demand.sigma", {5.0, 8.0, 10.0, 12.0, 15.0}},
                 {"market.a3", {500.0, 1000.0, 2000.0, 3000.0, 4000.0}}};
  } else if (id == "s11") {
    spec.dynamic = DynamicSpec{};
  } else {
    fail(ErrorKind::invalid_argument,
         fmt::format("unknown preset '{}'; expected one of s1..s11", id));
  }
  return spec;
}

}  // namespace procure::scenarios
