#include "tchedge/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "tchedge/error.hpp"
#include "tchedge/io.hpp"

namespace tchedge {
namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.is_null()) return "";
  return " (line " + std::to_string(mark.line + 1) + ")";
}

[[noreturn]] void fail(const std::string& field, const YAML::Node& node, const std::string& why) {
  throw ConfigError("config field '" + field + "'" + where(node) + ": " + why);
}

void check_keys(const YAML::Node& node, const std::string& field,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(field, node, "expected a table");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      fail(field.empty() ? key : field + "." + key, kv.first, "unknown key");
    }
  }
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

template <class T>
T read(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(field, node, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(field, node, "cannot convert '" + node.Scalar() + "'");
  }
}

template <class T>
void optional(const YAML::Node& parent, const std::string& key, const std::string& prefix, T& out) {
  const YAML::Node node = parent[key];
  if (node) out = read<T>(node, join(prefix, key));
}

void optional_list(const YAML::Node& parent, const std::string& key, const std::string& prefix,
                   std::vector<double>& out) {
  const YAML::Node node = parent[key];
  if (!node) return;
  const auto field = join(prefix, key);
  if (!node.IsSequence()) fail(field, node, "expected a list");
  out.clear();
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(read<double>(node[k], field + "[" + std::to_string(k) + "]"));
  }
}

IntensitySpec parse_intensity(const YAML::Node& node, const std::string& field) {
  if (!node.IsMap()) fail(field, node, "expected a table");
  std::string type = "constant";
  optional(node, "type", field, type);
  if (type == "constant") {
    check_keys(node, field, {"type", "level"});
    ConstantIntensity c;
    optional(node, "level", field, c.level);
    return c;
  }
  if (type == "piecewise") {
    check_keys(node, field, {"type", "breakpoints"});
    PiecewiseIntensity p;
    const YAML::Node bp = node["breakpoints"];
    const auto bf = join(field, "breakpoints");
    if (!bp || !bp.IsSequence()) fail(bf, bp ? bp : node, "expected a list of [time, level]");
    for (std::size_t k = 0; k < bp.size(); ++k) {
      const auto ef = bf + "[" + std::to_string(k) + "]";
      if (!bp[k].IsSequence() || bp[k].size() != 2) fail(ef, bp[k], "expected [time, level]");
      p.breakpoints.emplace_back(read<double>(bp[k][0], ef), read<double>(bp[k][1], ef));
    }
    return p;
  }
  if (type == "cir") {
    check_keys(node, field, {"type", "speed", "level", "vol", "initial"});
    CirIntensity c;
    optional(node, "speed", field, c.speed);
    optional(node, "level", field, c.level);
    optional(node, "vol", field, c.vol);
    optional(node, "initial", field, c.initial);
    return c;
  }
  fail(join(field, "type"), node["type"], "unknown intensity type '" + type + "'");
}

Filtration parse_filtration(const std::string& text, const YAML::Node& node) {
  if (text == "F") return Filtration::F;
  if (text == "G") return Filtration::G;
  fail("filtration", node, "expected F or G");
}

void emit_double(YAML::Emitter& e, double v) { e << format_double(v); }

void emit_list(YAML::Emitter& e, const std::vector<double>& values) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double v : values) emit_double(e, v);
  e << YAML::EndSeq;
}

void emit_intensity(YAML::Emitter& e, const IntensitySpec& spec) {
  e << YAML::BeginMap;
  if (const auto* c = std::get_if<ConstantIntensity>(&spec)) {
    e << YAML::Key << "type" << YAML::Value << "constant";
    e << YAML::Key << "level" << YAML::Value;
    emit_double(e, c->level);
  } else if (const auto* p = std::get_if<PiecewiseIntensity>(&spec)) {
    e << YAML::Key << "type" << YAML::Value << "piecewise";
    e << YAML::Key << "breakpoints" << YAML::Value << YAML::BeginSeq;
    for (const auto& [t, l] : p->breakpoints) emit_list(e, {t, l});
    e << YAML::EndSeq;
  } else {
    const auto& c = std::get<CirIntensity>(spec);
    e << YAML::Key << "type" << YAML::Value << "cir";
    e << YAML::Key << "speed" << YAML::Value;
    emit_double(e, c.speed);
    e << YAML::Key << "level" << YAML::Value;
    emit_double(e, c.level);
    e << YAML::Key << "vol" << YAML::Value;
    emit_double(e, c.vol);
    e << YAML::Key << "initial" << YAML::Value;
    emit_double(e, c.initial);
  }
  e << YAML::EndMap;
}

FeatureGroup parse_feature(const std::string& name, const YAML::Node& node) {
  if (name == "stock") return FeatureGroup::stock;
  if (name == "intensity") return FeatureGroup::intensity;
  if (name == "brownian") return FeatureGroup::brownian;
  if (name == "eta") return FeatureGroup::eta;
  fail("basis.features", node, "unknown feature group '" + name + "'");
}

// Cross-field checks reuse the module validators and relabel their errors.
void validate_config(const ExperimentConfig& c) {
  try {
    (void)c.model();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
  (void)c.claim.build();
  if (!(c.market.initial_price > 1.0)) {
    throw ConfigError("config field 'market.initial_price': must exceed 1");
  }
  if (!(std::abs(c.market.rate) <= c.market.rate_bound)) {
    throw ConfigError("config field 'market.rate': |rate| exceeds rate_bound");
  }
  if (!(c.market.volatility >= 0.0)) {
    throw ConfigError("config field 'market.volatility': must be non-negative");
  }
  for (double g : c.market.jump_impact) {
    if (!(g > -1.0)) throw ConfigError("config field 'market.jump_impact': values must exceed -1");
  }
  if (c.paths < 2) throw ConfigError("config field 'monte_carlo.paths': need at least 2 paths");
  if (c.scenario.rule != "minimal_norm" && c.scenario.rule != "user_supplied") {
    throw ConfigError("config field 'scenario.rule': expected minimal_norm or user_supplied");
  }
  if (c.scenario.rule == "user_supplied" && c.scenario.theta_H.size() != c.marks.size()) {
    throw ConfigError("config field 'scenario.theta_H': need one value per mark");
  }
  if (!(c.scenario.bound > 0.0)) {
    throw ConfigError("config field 'scenario.bound': must be positive");
  }
  for (double s : c.risk.scalings) {
    if (!(s >= 0.0)) throw ConfigError("config field 'risk.scalings': must be non-negative");
  }
  for (double t : c.risk.jump_tilts) {
    if (!(t >= 0.0)) throw ConfigError("config field 'risk.jump_tilts': must be non-negative");
  }
  if (c.risk.scalings.empty()) throw ConfigError("config field 'risk.scalings': empty family");
  (void)c.make_basis();
}

}  // namespace

ClaimSpec ClaimConfig::build() const {
  if (type == "call") return ClaimSpec::call(strike);
  if (type == "put") return ClaimSpec::put(strike);
  if (type == "digital") return ClaimSpec::digital(strike, payout);
  if (type == "intensity_exponential") return ClaimSpec::intensity_exponential(rate, notional);
  if (type == "zero") return ClaimSpec::zero();
  throw ConfigError("config field 'claim.type': unknown claim '" + type + "'");
}

ModelSpec ExperimentConfig::model() const {
  if (marks.size() != weights.size()) {
    throw ConfigError("config field 'jumps.weights': need one weight per mark");
  }
  if (market.jump_impact.size() != marks.size()) {
    throw ConfigError("config field 'market.jump_impact': need one value per mark");
  }
  ModelSpec m{
      TimeGrid(horizon, steps), intensity, JumpMeasure(marks, weights),
      MarketCoefficients::constant(market.rate, market.drift, market.volatility, market.jump_impact,
                                   market.initial_price, market.rate_bound)};
  validate(m.intensity.brownian);
  validate(m.intensity.jump);
  return m;
}

Basis ExperimentConfig::make_basis() const {
  std::vector<FeatureGroup> groups;
  for (const auto& f : basis.features) groups.push_back(parse_feature(f, YAML::Node()));
  return Basis::polynomial(filtration, groups);
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config syntax error (line " + std::to_string(e.mark.line + 1) +
                      "): " + e.msg);
  }
  ExperimentConfig c;
  if (!root || root.IsNull()) return (validate_config(c), c);
  check_keys(root, "",
             {"grid", "intensity", "jumps", "market", "claim", "scenario", "risk", "basis",
              "monte_carlo", "output", "filtration"});

  if (const auto g = root["grid"]) {
    check_keys(g, "grid", {"horizon", "steps"});
    optional(g, "horizon", "grid", c.horizon);
    optional(g, "steps", "grid", c.steps);
  }
  if (const auto in = root["intensity"]) {
    check_keys(in, "intensity", {"brownian", "jump"});
    if (in["brownian"])
      c.intensity.brownian = parse_intensity(in["brownian"], "intensity.brownian");
    if (in["jump"]) c.intensity.jump = parse_intensity(in["jump"], "intensity.jump");
  }
  if (const auto j = root["jumps"]) {
    check_keys(j, "jumps", {"marks", "weights"});
    optional_list(j, "marks", "jumps", c.marks);
    optional_list(j, "weights", "jumps", c.weights);
  }
  c.market.jump_impact.assign(c.marks.size(), 0.0);
  if (const auto m = root["market"]) {
    check_keys(m, "market",
               {"rate", "drift", "volatility", "jump_impact", "rate_bound", "initial_price"});
    optional(m, "rate", "market", c.market.rate);
    optional(m, "drift", "market", c.market.drift);
    optional(m, "volatility", "market", c.market.volatility);
    optional_list(m, "jump_impact", "market", c.market.jump_impact);
    optional(m, "rate_bound", "market", c.market.rate_bound);
    optional(m, "initial_price", "market", c.market.initial_price);
  }
  if (const auto cl = root["claim"]) {
    check_keys(cl, "claim", {"type", "strike", "payout", "rate", "notional"});
    optional(cl, "type", "claim", c.claim.type);
    optional(cl, "strike", "claim", c.claim.strike);
    optional(cl, "payout", "claim", c.claim.payout);
    optional(cl, "rate", "claim", c.claim.rate);
    optional(cl, "notional", "claim", c.claim.notional);
  }
  if (const auto s = root["scenario"]) {
    check_keys(s, "scenario", {"rule", "bound", "theta_B", "theta_H"});
    optional(s, "rule", "scenario", c.scenario.rule);
    optional(s, "bound", "scenario", c.scenario.bound);
    optional(s, "theta_B", "scenario", c.scenario.theta_B);
    optional_list(s, "theta_H", "scenario", c.scenario.theta_H);
  }
  if (const auto r = root["risk"]) {
    check_keys(r, "risk", {"scalings", "jump_tilts"});
    optional_list(r, "scalings", "risk", c.risk.scalings);
    optional_list(r, "jump_tilts", "risk", c.risk.jump_tilts);
  }
  if (const auto b = root["basis"]) {
    check_keys(b, "basis", {"features"});
    if (const auto f = b["features"]) {
      if (!f.IsSequence()) fail("basis.features", f, "expected a list");
      c.basis.features.clear();
      for (std::size_t k = 0; k < f.size(); ++k) {
        const auto name = read<std::string>(f[k], "basis.features");
        parse_feature(name, f[k]);
        c.basis.features.push_back(name);
      }
    }
  }
  if (const auto mc = root["monte_carlo"]) {
    check_keys(mc, "monte_carlo", {"paths", "seed", "dumped_paths"});
    optional(mc, "paths", "monte_carlo", c.paths);
    optional(mc, "seed", "monte_carlo", c.seed);
    optional(mc, "dumped_paths", "monte_carlo", c.dumped_paths);
  }
  optional(root, "output", "", c.output);
  if (const auto f = root["filtration"]) {
    c.filtration = parse_filtration(read<std::string>(f, "filtration"), f);
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "horizon" << YAML::Value;
  emit_double(e, c.horizon);
  e << YAML::Key << "steps" << YAML::Value << c.steps << YAML::EndMap;

  e << YAML::Key << "intensity" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "brownian" << YAML::Value;
  emit_intensity(e, c.intensity.brownian);
  e << YAML::Key << "jump" << YAML::Value;
  emit_intensity(e, c.intensity.jump);
  e << YAML::EndMap;

  e << YAML::Key << "jumps" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "marks" << YAML::Value;
  emit_list(e, c.marks);
  e << YAML::Key << "weights" << YAML::Value;
  emit_list(e, c.weights);
  e << YAML::EndMap;

  e << YAML::Key << "market" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "rate" << YAML::Value;
  emit_double(e, c.market.rate);
  e << YAML::Key << "drift" << YAML::Value;
  emit_double(e, c.market.drift);
  e << YAML::Key << "volatility" << YAML::Value;
  emit_double(e, c.market.volatility);
  e << YAML::Key << "jump_impact" << YAML::Value;
  emit_list(e, c.market.jump_impact);
  e << YAML::Key << "rate_bound" << YAML::Value;
  emit_double(e, c.market.rate_bound);
  e << YAML::Key << "initial_price" << YAML::Value;
  emit_double(e, c.market.initial_price);
  e << YAML::EndMap;

  e << YAML::Key << "claim" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "type" << YAML::Value << c.claim.type;
  e << YAML::Key << "strike" << YAML::Value;
  emit_double(e, c.claim.strike);
  e << YAML::Key << "payout" << YAML::Value;
  emit_double(e, c.claim.payout);
  e << YAML::Key << "rate" << YAML::Value;
  emit_double(e, c.claim.rate);
  e << YAML::Key << "notional" << YAML::Value;
  emit_double(e, c.claim.notional);
  e << YAML::EndMap;

  e << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "rule" << YAML::Value << c.scenario.rule;
  e << YAML::Key << "bound" << YAML::Value;
  emit_double(e, c.scenario.bound);
  e << YAML::Key << "theta_B" << YAML::Value;
  emit_double(e, c.scenario.theta_B);
  e << YAML::Key << "theta_H" << YAML::Value;
  emit_list(e, c.scenario.theta_H);
  e << YAML::EndMap;

  e << YAML::Key << "risk" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "scalings" << YAML::Value;
  emit_list(e, c.risk.scalings);
  e << YAML::Key << "jump_tilts" << YAML::Value;
  emit_list(e, c.risk.jump_tilts);
  e << YAML::EndMap;

  e << YAML::Key << "basis" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "features" << YAML::Value << YAML::Flow << c.basis.features;
  e << YAML::EndMap;

  e << YAML::Key << "monte_carlo" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "paths" << YAML::Value << c.paths;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "dumped_paths" << YAML::Value << c.dumped_paths;
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << c.output;
  e << YAML::Key << "filtration" << YAML::Value << (c.filtration == Filtration::F ? "F" : "G");
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = serialize_config(config);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

}  // namespace tchedge
