#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fns/grid.hpp"
#include "fns/io.hpp"
#include "fns/varlp.hpp"

namespace fns::cli {

using nlohmann::json;

// exponent preset as it appears in config files:
//   {"kind": "constant", "p": 2.0}
//   {"kind": "sinusoidal", "p": 3.0, "amplitude": 0.5}
//   {"kind": "log_tail", "p_infinity": 2.5, "b": 0.1}
//   {"kind": "table", "path": "exponent.fnsv"}   (single-component field file)
struct ExponentSpec {
  std::string kind = "constant";
  double p = 2.0;
  double amplitude = 0.0;
  double p_infinity = 2.0;
  double b = 0.0;
  std::string path;

  varlp::VariableExponent instantiate(const varlp::SampleDomain& dom) const {
    if (kind == "constant") return varlp::VariableExponent::constant(p, dom);
    if (kind == "sinusoidal") return varlp::VariableExponent::sinusoidal(p, amplitude, dom);
    if (kind == "log_tail") return varlp::VariableExponent::log_tail(p_infinity, b, dom);
    if (kind == "table") {
      const Field f = read_field(path);
      if (f.components != 1) throw std::runtime_error("exponent table must have one component");
      if (dom.kind == varlp::SampleDomain::Kind::Grid && !(f.grid == dom.grid))
        throw std::runtime_error("exponent table grid does not match the domain");
      std::vector<double> values(f.samples.begin(), f.samples.end());
      values.resize(dom.size(), values.empty() ? 2.0 : values.back());
      return varlp::VariableExponent::from_table(std::move(values), dom);
    }
    throw std::runtime_error("unknown exponent kind '" + kind + "'");
  }
};

struct ExperimentConfig {
  // grid block
  int dimension = 3;
  int points = 16;
  double length = 2.0 * std::numbers::pi;
  // solver block
  double alpha = 0.8;
  double horizon = 1.0;
  int time_points = 17;
  double tolerance = 1e-10;
  int max_iterations = 50;
  bool dealias = true;
  double viscosity = 1.0;
  // exponent block
  ExponentSpec time_exponent{.kind = "constant", .p = 5.0};
  ExponentSpec space_exponent{.kind = "constant", .p = 3.0};
  double q = 6.0;
  std::optional<double> frak_p;
  // data block
  std::string initial = "abc_beltrami_3d";
  double amplitude = 0.01;
  std::uint64_t seed = 1;
  std::string forcing = "zero";  // zero | velocity | tensor_bump
  double forcing_amplitude = 0.0;
  std::string input;  // field file for the norm subcommand
  // run block
  std::string output_dir = "out";
  std::string format = "json";  // json | csv
  bool quiet = false;
  int trials = 8;
  bool verify = false;
  std::vector<double> times{0.01, 0.1, 1.0, 10.0};
  std::vector<double> horizons;
  double beta = 1.0;
  double nu = 0.0;

  GridSpec grid() const { return GridSpec(dimension, points, length); }
  json to_json() const;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value() && errors.empty(); }
};

namespace detail {

struct Checker {
  std::vector<std::string>& errors;

  void unknown_keys(const json& obj, const char* block,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
      bool found = false;
      for (const char* k : known)
        if (key == k) found = true;
      if (!found) errors.push_back(std::string(block) + ": unknown key '" + key + "'");
    }
  }

  template <class T>
  void read(const json& obj, const char* block, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      errors.push_back(std::string(block) + "." + key + ": wrong type");
    }
  }

  void require(bool cond, const std::string& message) {
    if (!cond) errors.push_back(message);
  }
};

inline void parse_exponent(const json& obj, const char* block, ExponentSpec& spec,
                           Checker& check) {
  check.unknown_keys(obj, block, {"kind", "p", "amplitude", "p_infinity", "b", "path"});
  check.read(obj, block, "kind", spec.kind);
  check.read(obj, block, "p", spec.p);
  check.read(obj, block, "amplitude", spec.amplitude);
  check.read(obj, block, "p_infinity", spec.p_infinity);
  check.read(obj, block, "b", spec.b);
  check.read(obj, block, "path", spec.path);
  check.require(spec.kind == "constant" || spec.kind == "sinusoidal" ||
                    spec.kind == "log_tail" || spec.kind == "table",
                std::string(block) + ".kind: must be constant, sinusoidal, log_tail or table");
  if (spec.kind == "constant") check.require(spec.p > 1.0, std::string(block) + ".p: need p > 1");
  if (spec.kind == "sinusoidal")
    check.require(std::abs(spec.amplitude) < spec.p - 1.0,
                  std::string(block) + ": need |amplitude| < p - 1");
  if (spec.kind == "log_tail")
    check.require(spec.p_infinity > 1.0, std::string(block) + ".p_infinity: need > 1");
  if (spec.kind == "table")
    check.require(!spec.path.empty(), std::string(block) + ".path: required for tables");
}

}  // namespace detail

// Validates the whole document and reports every violation, not just the
// first. Unknown keys anywhere are rejected.
inline ParseResult parse_config_json(const json& doc) {
  ParseResult res;
  ExperimentConfig cfg;
  detail::Checker check{res.errors};

  if (!doc.is_object()) {
    res.errors.push_back("config: top level must be a JSON object");
    return res;
  }
  check.unknown_keys(doc, "config", {"grid", "solver", "exponents", "data", "run"});

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    check.unknown_keys(g, "grid", {"dimension", "points", "length"});
    check.read(g, "grid", "dimension", cfg.dimension);
    check.read(g, "grid", "points", cfg.points);
    check.read(g, "grid", "length", cfg.length);
  }
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check.unknown_keys(s, "solver",
                       {"alpha", "horizon", "time_points", "tolerance", "max_iterations",
                        "dealias", "viscosity"});
    check.read(s, "solver", "alpha", cfg.alpha);
    check.read(s, "solver", "horizon", cfg.horizon);
    check.read(s, "solver", "time_points", cfg.time_points);
    check.read(s, "solver", "tolerance", cfg.tolerance);
    check.read(s, "solver", "max_iterations", cfg.max_iterations);
    check.read(s, "solver", "dealias", cfg.dealias);
    check.read(s, "solver", "viscosity", cfg.viscosity);
  }
  if (doc.contains("exponents")) {
    const json& e = doc.at("exponents");
    check.unknown_keys(e, "exponents", {"time", "space", "q", "frak_p"});
    if (e.contains("time")) detail::parse_exponent(e.at("time"), "exponents.time",
                                                   cfg.time_exponent, check);
    if (e.contains("space")) detail::parse_exponent(e.at("space"), "exponents.space",
                                                    cfg.space_exponent, check);
    check.read(e, "exponents", "q", cfg.q);
    if (e.contains("frak_p")) {
      double v = 0.0;
      check.read(e, "exponents", "frak_p", v);
      cfg.frak_p = v;
    }
  }
  if (doc.contains("data")) {
    const json& d = doc.at("data");
    check.unknown_keys(d, "data",
                       {"initial", "amplitude", "seed", "forcing", "forcing_amplitude", "input"});
    check.read(d, "data", "initial", cfg.initial);
    check.read(d, "data", "amplitude", cfg.amplitude);
    check.read(d, "data", "seed", cfg.seed);
    check.read(d, "data", "forcing", cfg.forcing);
    check.read(d, "data", "forcing_amplitude", cfg.forcing_amplitude);
    check.read(d, "data", "input", cfg.input);
  }
  if (doc.contains("run")) {
    const json& r = doc.at("run");
    check.unknown_keys(r, "run",
                       {"output_dir", "format", "quiet", "trials", "verify", "times", "horizons",
                        "beta", "nu"});
    check.read(r, "run", "output_dir", cfg.output_dir);
    check.read(r, "run", "format", cfg.format);
    check.read(r, "run", "quiet", cfg.quiet);
    check.read(r, "run", "trials", cfg.trials);
    check.read(r, "run", "verify", cfg.verify);
    check.read(r, "run", "times", cfg.times);
    check.read(r, "run", "horizons", cfg.horizons);
    check.read(r, "run", "beta", cfg.beta);
    check.read(r, "run", "nu", cfg.nu);
  }

  // cross-field constraints, all reported together
  check.require(cfg.dimension >= 1 && cfg.dimension <= 3, "grid.dimension: must be 1, 2 or 3");
  check.require(cfg.points >= 4 && cfg.points % 2 == 0,
                "grid.points: must be even and at least 4");
  check.require(cfg.length > 0.0, "grid.length: must be positive");
  check.require(cfg.alpha > 0.5 && cfg.alpha <= 1.0, "solver.alpha: out of (0.5, 1]");
  check.require(cfg.horizon > 0.0, "solver.horizon: must be positive");
  check.require(cfg.time_points >= 2, "solver.time_points: need at least 2");
  check.require(cfg.tolerance > 0.0, "solver.tolerance: must be positive");
  check.require(cfg.max_iterations >= 1, "solver.max_iterations: need at least 1");
  check.require(cfg.viscosity > 0.0, "solver.viscosity: must be positive");
  check.require(cfg.q > 1.0, "exponents.q: need q > 1");
  if (cfg.frak_p) check.require(*cfg.frak_p > 1.0, "exponents.frak_p: need > 1");
  check.require(cfg.trials >= 1, "run.trials: need at least 1");
  check.require(cfg.format == "json" || cfg.format == "csv", "run.format: json or csv");
  check.require(cfg.forcing == "zero" || cfg.forcing == "velocity" ||
                    cfg.forcing == "tensor_bump",
                "data.forcing: zero, velocity or tensor_bump");
  for (double t : cfg.times) check.require(t > 0.0, "run.times: entries must be positive");
  for (double h : cfg.horizons)
    check.require(h > 0.0, "run.horizons: entries must be positive");

  if (res.errors.empty()) res.config = cfg;
  return res;
}

inline ParseResult parse_config(const std::string& path) {
  ParseResult res;
  std::ifstream is(path);
  if (!is) {
    res.errors.push_back("config: cannot open '" + path + "'");
    return res;
  }
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    res.errors.push_back(std::string("config: malformed JSON: ") + e.what());
    return res;
  }
  return parse_config_json(doc);
}

inline json ExperimentConfig::to_json() const {
  json exps = {{"time", {{"kind", time_exponent.kind},
                         {"p", time_exponent.p},
                         {"amplitude", time_exponent.amplitude},
                         {"p_infinity", time_exponent.p_infinity},
                         {"b", time_exponent.b},
                         {"path", time_exponent.path}}},
               {"space", {{"kind", space_exponent.kind},
                          {"p", space_exponent.p},
                          {"amplitude", space_exponent.amplitude},
                          {"p_infinity", space_exponent.p_infinity},
                          {"b", space_exponent.b},
                          {"path", space_exponent.path}}},
               {"q", q}};
  if (frak_p) exps["frak_p"] = *frak_p;
  return json{
      {"grid", {{"dimension", dimension}, {"points", points}, {"length", length}}},
      {"solver",
       {{"alpha", alpha},
        {"horizon", horizon},
        {"time_points", time_points},
        {"tolerance", tolerance},
        {"max_iterations", max_iterations},
        {"dealias", dealias},
        {"viscosity", viscosity}}},
      {"exponents", exps},
      {"data",
       {{"initial", initial},
        {"amplitude", amplitude},
        {"seed", seed},
        {"forcing", forcing},
        {"forcing_amplitude", forcing_amplitude},
        {"input", input}}},
      {"run",
       {{"output_dir", output_dir},
        {"format", format},
        {"quiet", quiet},
        {"trials", trials},
        {"verify", verify},
        {"times", times},
        {"horizons", horizons},
        {"beta", beta},
        {"nu", nu}}}};
}

}  // namespace fns::cli
