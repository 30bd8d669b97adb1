#include <fstream>

#include "cli.hpp"

namespace occupancy::cli {

using nlohmann::json;

namespace {

Rational rational_field(const json& v, const char* key) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) return Rational::from_double(v.get<double>());
  throw ConfigError(std::string(key) + ": expected a number or a \"p/q\" string");
}

Vector vector_field(const json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string(key) + ": expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string(key) + ": expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

template <typename T>
std::optional<T> optional_field(const json& doc, const char* key) {
  if (!doc.contains(key)) return std::nullopt;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

DegeneracySchedule schedule_from(const json& doc, Regime regime, std::optional<double> c) {
  if (!doc.contains("schedule")) return default_schedule(regime, c.value_or(1.0));
  const auto kind = optional_field<std::string>(doc, "schedule").value();
  const auto param = optional_field<double>(doc, "schedule_param");
  if (kind == "power") return DegeneracySchedule::power(param.value_or(regime == Regime::LowDegeneracy ? 0.5 : 2.0));
  if (kind == "linear") return DegeneracySchedule::linear(param.value_or(c.value_or(1.0)));
  if (kind == "constant") {
    if (!param) throw ConfigError("schedule_param: required for a constant schedule");
    return DegeneracySchedule::constant(static_cast<std::int64_t>(*param));
  }
  throw ConfigError("schedule: unknown kind '" + kind + "'");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const char* key : {"energies", "weights", "energy_cap", "regime"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("missing key: ") + key);
  }

  ExperimentConfig cfg;
  EnsembleSpec& spec = cfg.spec;
  const json& energies = doc.at("energies");
  if (!energies.is_array()) throw ConfigError("energies: expected an array");
  for (const auto& e : energies) spec.energies.push_back(rational_field(e, "energies"));
  const Vector w = vector_field(doc.at("weights"), "weights");
  spec.weights.assign(w.data(), w.data() + w.size());
  spec.energy_cap = rational_field(doc.at("energy_cap"), "energy_cap");
  const auto regime = optional_field<std::string>(doc, "regime").value();
  try {
    spec.regime = parse_regime(regime);
  } catch (const std::invalid_argument&) {
    throw ConfigError("regime: unknown value '" + regime + "'");
  }
  spec.c = optional_field<double>(doc, "c");
  spec.schedule = schedule_from(doc, spec.regime, spec.c);
  cfg.spec = validate_spec(std::move(spec));

  if (auto list = optional_field<std::vector<std::int64_t>>(doc, "N_list")) {
    cfg.n_list = *list;
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
      if (cfg.n_list[i] < 1) throw ConfigError("N_list: entries must be >= 1");
      if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) throw ConfigError("N_list: must be strictly increasing");
    }
  }
  if (doc.contains("xi_list")) {
    const json& xs = doc.at("xi_list");
    if (!xs.is_array()) throw ConfigError("xi_list: expected an array of vectors");
    for (const auto& xi : xs) {
      Vector v = vector_field(xi, "xi_list");
      if (v.size() != static_cast<Eigen::Index>(cfg.spec.levels())) throw ConfigError("xi_list: wrong dimension");
      cfg.xi_list.push_back(std::move(v));
    }
  }
  if (doc.contains("x")) {
    cfg.x = vector_field(doc.at("x"), "x");
    if (cfg.x->size() != static_cast<Eigen::Index>(cfg.spec.levels())) throw ConfigError("x: wrong dimension");
  }
  cfg.n = optional_field<std::int64_t>(doc, "N");
  if (cfg.n && *cfg.n < 1) throw ConfigError("N: must be >= 1");
  if (auto count = optional_field<std::int64_t>(doc, "count")) {
    if (*count < 1) throw ConfigError("count: must be >= 1");
    cfg.count = static_cast<std::size_t>(*count);
  }
  cfg.method = optional_field<std::string>(doc, "method").value_or("exact");
  if (cfg.method != "exact" && cfg.method != "chain") throw ConfigError("method: expected \"exact\" or \"chain\"");
  cfg.steps = optional_field<std::int64_t>(doc, "steps");
  cfg.burn_in = optional_field<std::int64_t>(doc, "burn_in");
  cfg.thinning = optional_field<std::int64_t>(doc, "thinning");
  cfg.seed = optional_field<std::uint64_t>(doc, "seed");
  cfg.sampler_fallback = optional_field<bool>(doc, "sampler_fallback").value_or(false);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace occupancy::cli
