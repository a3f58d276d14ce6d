#include "procure/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "procure/error.hpp"

namespace procure::config {

namespace {

/// Wraps a node with its dotted field path for error messages.
class Field {
 public:
  Field(YAML::Node node, std::string path, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), source_(&source) {}

  [[noreturn]] void error(std::string_view reason) const {
    const auto mark = node_.Mark();
    if (mark.is_null()) {
      fail(ErrorKind::validation, fmt::format("{}: {}: {}", *source_, path_, reason));
    }
    fail(ErrorKind::validation, fmt::format("{}:{}:{}: {}: {}", *source_, mark.line + 1,
                                            mark.column + 1, path_, reason));
  }

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }

  Field child(const std::string& key) const {
    return Field(node_[key], path_.empty() ? key : path_ + "." + key, *source_);
  }
  Field at(std::size_t i) const {
    return Field(node_[i], fmt::format("{}[{}]", path_, i), *source_);
  }

  void expect_map(const std::set<std::string>& allowed) const {
    if (!node_.IsMap()) error("expected a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) {
        Field(kv.first, path_.empty() ? key : path_ + "." + key, *source_).error("unknown field");
      }
    }
  }

  double as_double() const {
    if (!node_.IsScalar()) error("expected a number");
    try {
      const double v = node_.as<double>();
      if (!std::isfinite(v)) error("must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      error(fmt::format("expected a number, got '{}'", node_.Scalar()));
    }
  }

  std::uint64_t as_count() const {
    if (!node_.IsScalar()) error("expected a non-negative integer");
    try {
      const auto& s = node_.Scalar();
      if (!s.empty() && s.front() == '-') error("must be non-negative");
      return node_.as<std::uint64_t>();
    } catch (const YAML::BadConversion&) {
      error(fmt::format("expected a non-negative integer, got '{}'", node_.Scalar()));
    }
  }

  bool as_bool() const {
    try {
      return node_.as<bool>();
    } catch (const YAML::BadConversion&) {
      error("expected true or false");
    }
  }

  std::string as_string() const {
    if (!node_.IsScalar()) error("expected a string");
    return node_.Scalar();
  }

  std::vector<double> as_doubles() const {
    if (!node_.IsSequence()) error("expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node_.size(); ++i) out.push_back(at(i).as_double());
    return out;
  }

  bool has(const std::string& key) const { return node_.IsMap() && node_[key].IsDefined(); }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string* source_;
};

void read_if(const Field& f, const std::string& key, double& target) {
  if (f.has(key)) target = f.child(key).as_double();
}

void parse_market(const Field& f, MarketEconomics& m) {
  f.expect_map({"price", "salvage", "penalty", "a1", "a2", "a3", "nu"});
  read_if(f, "price", m.price);
  read_if(f, "salvage", m.salvage);
  read_if(f, "penalty", m.penalty);
  read_if(f, "a1", m.a1);
  read_if(f, "a2", m.a2);
  read_if(f, "a3", m.a3);
  read_if(f, "nu", m.nu);
  auto check = [&](const char* key, bool ok, std::string_view reason) {
    if (!ok) (f.has(key) ? f.child(key) : f).error(fmt::format("{} {}", key, reason));
  };
  check("price", m.price > 0.0, "must be > 0");
  check("salvage", m.salvage >= 0.0, "must be >= 0");
  check("salvage", m.salvage < m.price, "must be below price");
  check("penalty", m.penalty >= 0.0, "must be >= 0");
  check("a1", m.a1 > 0.0, "must be > 0");
  check("a2", m.a2 > 0.0, "must be > 0");
  check("a3", m.a3 > 0.0, "must be > 0");
  check("nu", m.nu > 1.0, "must be > 1");
}

TruncatedNormal parse_demand(const Field& f, const TruncatedNormal& current) {
  f.expect_map({"mu", "sigma", "lower", "upper"});
  double mu = current.mu(), sigma = current.sigma();
  double lower = current.lower(), upper = current.upper();
  read_if(f, "mu", mu);
  read_if(f, "sigma", sigma);
  read_if(f, "lower", lower);
  read_if(f, "upper", upper);
  if (!(sigma > 0.0)) {
    (f.has("sigma") ? f.child("sigma") : f).error(fmt::format("must be > 0 (got {})", sigma));
  }
  if (!(lower < upper)) {
    (f.has("upper") ? f.child("upper") : f).error("upper must exceed lower");
  }
  try {
    return TruncatedNormal(mu, sigma, lower, upper);
  } catch (const Error& e) {
    f.error(e.what());
  }
}

ReadinessComponents parse_readiness(const Field& f) {
  f.expect_map({"smart_contract", "erp", "cloud", "human_capital", "security", "weights"});
  ReadinessComponents rc;
  const std::pair<const char*, double*> parts[] = {{"smart_contract", &rc.smart_contract},
                                                   {"erp", &rc.erp},
                                                   {"cloud", &rc.cloud},
                                                   {"human_capital", &rc.human_capital},
                                                   {"security", &rc.security}};
  for (const auto& [key, target] : parts) {
    if (!f.has(key)) f.error(fmt::format("missing component '{}'", key));
    *target = f.child(key).as_double();
    if (!(*target >= 0.0 && *target <= 1.0)) f.child(key).error("must lie in [0,1]");
  }
  if (f.has("weights")) {
    const auto w = f.child("weights").as_doubles();
    if (w.size() != 5) f.child("weights").error("expected five weights");
    std::copy(w.begin(), w.end(), rc.weights.begin());
  }
  try {
    (void)composite_beta(rc);
  } catch (const Error& e) {
    (f.has("weights") ? f.child("weights") : f).error(e.what());
  }
  return rc;
}

std::vector<SupplierProfile> parse_suppliers(const Field& f) {
  if (!f.node().IsSequence() || f.node().size() == 0) f.error("expected a non-empty list");
  std::vector<SupplierProfile> out;
  std::set<int> ids;
  for (std::size_t i = 0; i < f.node().size(); ++i) {
    const Field s = f.at(i);
    s.expect_map({"id", "base_cost", "beta", "readiness"});
    SupplierProfile sp;
    sp.id = s.has("id") ? static_cast<int>(s.child("id").as_count()) : static_cast<int>(i + 1);
    if (!ids.insert(sp.id).second) s.child("id").error("duplicate supplier id");
    if (!s.has("base_cost")) s.error("missing base_cost");
    sp.base_cost = s.child("base_cost").as_double();
    if (!(sp.base_cost > 0.0)) s.child("base_cost").error("must be > 0");
    if (s.has("beta") == s.has("readiness")) s.error("give exactly one of beta or readiness");
    if (s.has("beta")) {
      const double b = s.child("beta").as_double();
      if (!(b >= 0.0 && b <= 1.0)) s.child("beta").error("must lie in [0,1]");
      sp.readiness = b;
    } else {
      sp.readiness = parse_readiness(s.child("readiness"));
    }
    out.push_back(std::move(sp));
  }
  return out;
}

void parse_run(const Field& f, RunSettings& run) {
  f.expect_map({"seed", "replications", "out", "formats"});
  if (f.has("seed")) run.seed = f.child("seed").as_count();
  if (f.has("replications")) {
    run.replications = f.child("replications").as_count();
    if (run.replications < 100) f.child("replications").error("must be >= 100");
  }
  if (f.has("out")) run.out = f.child("out").as_string();
  if (f.has("formats")) {
    const Field fm = f.child("formats");
    if (!fm.node().IsSequence() || fm.node().size() == 0) fm.error("expected a non-empty list");
    run.formats.clear();
    for (std::size_t i = 0; i < fm.node().size(); ++i) {
      try {
        run.formats.push_back(parse_format(fm.at(i).as_string()));
      } catch (const Error& e) {
        fm.at(i).error(e.what());
      }
    }
  }
}

void parse_optimizer(const Field& f, SearchOptions& search) {
  f.expect_map({"grid_step", "refine"});
  if (f.has("grid_step")) {
    search.grid_step = f.child("grid_step").as_double();
    if (!(search.grid_step > 0.0 && search.grid_step <= 0.5)) {
      f.child("grid_step").error("must lie in (0, 0.5]");
    }
  }
  if (f.has("refine")) search.refine = f.child("refine").as_bool();
}

const std::set<std::string> kPaths{
    "demand.mu",     "demand.sigma",   "demand.lower",   "demand.upper",
    "market.price",  "market.salvage", "market.penalty", "market.a1",
    "market.a2",     "market.a3",      "market.nu",      "suppliers.beta_halfwidth"};

std::string parameter_path(const Field& f) {
  auto path = f.as_string();
  if (!kPaths.contains(path)) f.error(fmt::format("unknown parameter path '{}'", path));
  return path;
}

scenarios::DynamicSpec parse_dynamic(const Field& f) {
  f.expect_map({"cycles", "a3_initial", "a3_decline", "learning_rate", "target_penalty",
                "alpha_initial"});
  scenarios::DynamicSpec d;
  if (f.has("cycles")) d.cycles = f.child("cycles").as_count();
  read_if(f, "a3_initial", d.a3_initial);
  read_if(f, "a3_decline", d.a3_decline);
  read_if(f, "learning_rate", d.learning_rate);
  read_if(f, "target_penalty", d.target_penalty);
  read_if(f, "alpha_initial", d.alpha_initial);
  try {
    d.validate();
  } catch (const Error& e) {
    f.error(e.what());
  }
  return d;
}

scenarios::ScenarioSpec parse_scenario(const Field& f, const Model& base) {
  f.expect_map({"id", "sampler", "axes", "ranges", "lhs_samples", "common_random_numbers",
                "dynamic"});
  scenarios::ScenarioSpec spec;
  spec.base = base;
  if (f.has("id")) spec.id = f.child("id").as_string();
  if (f.has("dynamic")) {
    if (f.has("axes") || f.has("ranges")) f.error("dynamic scenarios take no axes or ranges");
    spec.dynamic = parse_dynamic(f.child("dynamic"));
  } else {
    const std::string sampler = f.has("sampler") ? f.child("sampler").as_string() : "grid";
    if (sampler == "grid") {
      spec.sampler = scenarios::Sampler::grid;
      if (!f.has("axes")) f.error("grid scenarios need 'axes'");
      const Field axes = f.child("axes");
      if (!axes.node().IsSequence() || axes.node().size() == 0) {
        axes.error("expected a non-empty list");
      }
      for (std::size_t i = 0; i < axes.node().size(); ++i) {
        const Field a = axes.at(i);
        a.expect_map({"path", "values"});
        if (!a.has("path") || !a.has("values")) a.error("axis needs 'path' and 'values'");
        scenarios::Axis axis{parameter_path(a.child("path")), a.child("values").as_doubles()};
        if (axis.values.empty()) a.child("values").error("expected at least one value");
        spec.axes.push_back(std::move(axis));
      }
    } else if (sampler == "latin-hypercube") {
      spec.sampler = scenarios::Sampler::latin_hypercube;
      if (!f.has("ranges")) f.error("latin-hypercube scenarios need 'ranges'");
      const Field ranges = f.child("ranges");
      if (!ranges.node().IsSequence() || ranges.node().size() == 0) {
        ranges.error("expected a non-empty list");
      }
      for (std::size_t i = 0; i < ranges.node().size(); ++i) {
        const Field r = ranges.at(i);
        r.expect_map({"path", "lo", "hi"});
        if (!r.has("path") || !r.has("lo") || !r.has("hi")) r.error("range needs path, lo, hi");
        scenarios::Range range{parameter_path(r.child("path")), r.child("lo").as_double(),
                               r.child("hi").as_double()};
        if (!(range.lo < range.hi)) r.child("hi").error("hi must exceed lo");
        spec.lhs_ranges.push_back(std::move(range));
      }
      if (f.has("lhs_samples")) {
        spec.lhs_samples = f.child("lhs_samples").as_count();
        if (spec.lhs_samples < 2) f.child("lhs_samples").error("must be >= 2");
      }
    } else {
      f.child("sampler").error("expected 'grid' or 'latin-hypercube'");
    }
  }
  if (f.has("common_random_numbers")) {
    spec.common_random_numbers = f.child("common_random_numbers").as_bool();
  }
  return spec;
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  fail(ErrorKind::validation, fmt::format("unknown format '{}'; expected csv or json", name));
}

std::string_view to_string(OutputFormat format) noexcept {
  return format == OutputFormat::csv ? "csv" : "json";
}

RunConfig parse(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    fail(ErrorKind::validation,
         fmt::format("{}:{}:{}: {}", source, e.mark.line + 1, e.mark.column + 1, e.msg));
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  const Field top(root, "", source);
  top.expect_map({"market", "demand", "suppliers", "run", "optimizer", "scenario"});
  if (top.has("market")) parse_market(top.child("market"), cfg.model.market);
  if (top.has("demand")) cfg.model.demand = parse_demand(top.child("demand"), cfg.model.demand);
  if (top.has("suppliers")) cfg.model.suppliers = parse_suppliers(top.child("suppliers"));
  if (top.has("run")) parse_run(top.child("run"), cfg.run);
  if (top.has("optimizer")) parse_optimizer(top.child("optimizer"), cfg.search);
  try {
    cfg.model.validate();
  } catch (const Error& e) {
    top.error(e.what());
  }
  if (top.has("scenario")) {
    const Field sc = top.child("scenario");
    if (sc.node().IsScalar()) {
      const auto id = sc.as_string();
      const auto& ids = scenarios::preset_ids();
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        sc.error(fmt::format("unknown preset '{}'; expected one of s1..s11", id));
      }
      cfg.scenario_preset = id;
    } else {
      cfg.scenario = parse_scenario(sc, cfg.model);
    }
  }
  return cfg;
}

RunConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

scenarios::ScenarioSpec resolve_scenario(const RunConfig& config,
                                         std::optional<std::string_view> preset_id) {
  scenarios::ScenarioSpec spec;
  if (preset_id) {
    spec = scenarios::preset(*preset_id, config.model);
  } else if (config.scenario) {
    spec = *config.scenario;
  } else if (config.scenario_preset) {
    spec = scenarios::preset(*config.scenario_preset, config.model);
  } else {
    fail(ErrorKind::validation, "no scenario selected: give a preset id or a spec with a scenario");
  }
  spec.seed = config.run.seed;
  spec.replications = config.run.replications;
  spec.search = config.search;
  return spec;
}

}  // namespace procure::config
