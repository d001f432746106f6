#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvq/bayes_opt.hpp"
#include "bvq/errors.hpp"
#include "bvq/pde_model.hpp"
#include "bvq/vqls.hpp"

namespace bvq::config {

using nlohmann::json;

enum class Mode { bvqpco, classical_baseline, vqls_only, verify_bounds };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::bvqpco: return "bvqpco";
    case Mode::classical_baseline: return "classical-baseline";
    case Mode::vqls_only: return "vqls-only";
    case Mode::verify_bounds: return "verify-bounds";
  }
  return "?";
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "bvqpco") return Mode::bvqpco;
  if (s == "classical-baseline") return Mode::classical_baseline;
  if (s == "vqls-only") return Mode::vqls_only;
  if (s == "verify-bounds") return Mode::verify_bounds;
  throw ConfigError("unknown mode '" + s + "'");
}

struct BoBlock {
  int n_init = 10;
  int n_iter = 20;
  int n_mc = 128;
  double noise_c = 0.1;
  std::optional<std::uint64_t> seed;  // falls back to the top-level seed
  bo::AcquisitionKind acquisition = bo::AcquisitionKind::noisy_ei;
};

struct BaselineBlock {
  int grid = 41;
  std::optional<pde::DesignPoint> expected_argmin;  // checked to within one cell when present
};

struct VerifyBlock {
  int grid = 5;
  int n_t = 32;  // time levels of the finer-step variant used for the implicit bound
  double eps = 0.05;
};

struct PlotBlock {
  int landscape_grid = 41;
  int stderr_grid = 0;  // 0 skips the VQLS-based stderr landscape
};

struct ExperimentConfig {
  Mode mode = Mode::bvqpco;
  std::uint64_t seed = 0;
  pde::HeatProblem problem = pde::reference_problem();
  pde::Scheme scheme = pde::Scheme::implicit_euler;
  vqls::VqlsConfig vqls;
  BoBlock bo;
  BaselineBlock baseline;
  VerifyBlock verify;
  PlotBlock plot;
  std::vector<pde::DesignPoint> designs;  // vqls-only targets
  int vqls_seeds = 1;                     // vqls-only: seeds tried per design, best kept
  bool oracle_injection = false;

  std::uint64_t bo_seed() const { return bo.seed.value_or(seed); }
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

inline pde::DesignPoint design_from_json(const json& j, const std::string& where) {
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) {
    check_keys(j, {"l", "alpha"}, where);
    return {get<double>(j, "l", where), get<double>(j, "alpha", where)};
  }
  throw ConfigError(where + " must be [l, alpha] or {\"l\":..,\"alpha\":..}");
}

inline pde::HeatProblem problem_from_json(const json& j, pde::Scheme& scheme) {
  const std::string w = "problem";
  check_keys(j, {"n_x", "n_t", "dt", "conductivity", "flux", "initial_temps", "bounds", "weights", "scheme"}, w);
  const int n_x = j.value("n_x", 8), n_t = j.value("n_t", 4);
  const double dt = j.value("dt", 0.25), k = j.value("conductivity", 1.0);
  double q = 50.0;
  std::vector<double> flux;
  if (j.contains("flux")) {
    if (j["flux"].is_number())
      q = j["flux"].get<double>();
    else
      flux = get<std::vector<double>>(j, "flux", w);
  }
  if (n_t < 2 || n_x < 2) throw ConfigError("problem.n_x and problem.n_t must be >= 2");
  pde::HeatProblem p = pde::make_problem(n_x, n_t, dt, k, flux.empty() ? q : flux.front());
  if (!flux.empty()) p.flux = flux;
  if (j.contains("initial_temps")) {
    const auto& t = j["initial_temps"];
    if (t.is_string()) {
      if (t.get<std::string>() != "linear") throw ConfigError("problem.initial_temps must be 'linear' or an array");
    } else {
      const auto v = get<std::vector<double>>(j, "initial_temps", w);
      p.initial_temps = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    check_keys(b, {"l_min", "l_max", "alpha_min", "alpha_max"}, "problem.bounds");
    maybe(b, "l_min", p.bounds.l_min, "problem.bounds");
    maybe(b, "l_max", p.bounds.l_max, "problem.bounds");
    maybe(b, "alpha_min", p.bounds.alpha_min, "problem.bounds");
    maybe(b, "alpha_max", p.bounds.alpha_max, "problem.bounds");
  }
  if (j.contains("weights")) {
    const auto& b = j["weights"];
    check_keys(b, {"w1", "w2", "w3"}, "problem.weights");
    maybe(b, "w1", p.weights.w1, "problem.weights");
    maybe(b, "w2", p.weights.w2, "problem.weights");
    maybe(b, "w3", p.weights.w3, "problem.weights");
  }
  if (j.contains("scheme")) {
    try {
      scheme = pde::scheme_from_string(j["scheme"].get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(std::string("problem.scheme: ") + e.what());
    }
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  return p;
}

inline quantum::ShotCount shots_from_json(const json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "exact")) return std::nullopt;
  if (j.is_number_integer() && j.get<long long>() > 0) return static_cast<std::uint64_t>(j.get<long long>());
  throw ConfigError("vqls.shots must be a positive integer or \"exact\"");
}

inline vqls::VqlsConfig vqls_from_json(const json& j) {
  const std::string w = "vqls";
  check_keys(j, {"cost", "gamma", "shots", "max_iters", "optimizer", "step", "layers", "init_beta", "evaluator",
                 "trust_radius"},
             w);
  vqls::VqlsConfig c;
  try {
    if (j.contains("cost")) c.cost_variant = vqls::cost_variant_from_string(j["cost"].get<std::string>());
    if (j.contains("optimizer")) c.optimizer = vqls::optimizer_from_string(j["optimizer"].get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(std::string("vqls: ") + e.what());
  }
  maybe(j, "gamma", c.gamma, w);
  maybe(j, "max_iters", c.max_iters, w);
  maybe(j, "step", c.adagrad_step, w);
  maybe(j, "layers", c.layers, w);
  if (j.contains("shots")) c.shots = shots_from_json(j["shots"]);
  if (j.contains("init_beta")) {
    const auto v = get<std::vector<double>>(j, "init_beta", w);
    if (v.size() != 2) throw ConfigError("vqls.init_beta must be [a, b]");
    c.init_a = v[0];
    c.init_b = v[1];
  }
  if (j.contains("evaluator")) {
    const auto s = get<std::string>(j, "evaluator", w);
    if (s == "statevector")
      c.evaluator = vqls::EvaluatorKind::statevector;
    else if (s == "hadamard")
      c.evaluator = vqls::EvaluatorKind::hadamard;
    else
      throw ConfigError("vqls.evaluator must be statevector or hadamard");
  }
  if (j.contains("trust_radius")) {
    const auto v = get<std::vector<double>>(j, "trust_radius", w);
    if (v.size() != 2) throw ConfigError("vqls.trust_radius must be [start, end]");
    c.trust_radius_start = v[0];
    c.trust_radius_end = v[1];
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("vqls: ") + e.what());
  }
  return c;
}

}  // namespace detail

inline ExperimentConfig from_json(const json& j) {
  detail::check_keys(j, {"mode", "seed", "problem", "vqls", "bo", "baseline", "verify", "plot", "designs", "vqls_seeds",
                         "oracle_injection", "comment"},
                     "config");
  if (!j.contains("seed")) throw ConfigError("seed is mandatory");
  ExperimentConfig c;
  const auto& s = j["seed"];
  if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
    throw ConfigError("seed must be a non-negative integer");
  c.seed = s.get<std::uint64_t>();
  if (j.contains("mode")) c.mode = mode_from_string(detail::get<std::string>(j, "mode", "config"));
  if (j.contains("problem")) c.problem = detail::problem_from_json(j["problem"], c.scheme);
  if (j.contains("vqls")) c.vqls = detail::vqls_from_json(j["vqls"]);
  if (j.contains("bo")) {
    const auto& b = j["bo"];
    detail::check_keys(b, {"n_init", "n_iter", "n_mc", "noise_c", "seed", "acquisition"}, "bo");
    detail::maybe(b, "n_init", c.bo.n_init, "bo");
    detail::maybe(b, "n_iter", c.bo.n_iter, "bo");
    detail::maybe(b, "n_mc", c.bo.n_mc, "bo");
    detail::maybe(b, "noise_c", c.bo.noise_c, "bo");
    if (b.contains("seed")) c.bo.seed = detail::get<std::uint64_t>(b, "seed", "bo");
    if (b.contains("acquisition")) {
      const auto a = detail::get<std::string>(b, "acquisition", "bo");
      if (a == "noisy-ei")
        c.bo.acquisition = bo::AcquisitionKind::noisy_ei;
      else if (a == "ei")
        c.bo.acquisition = bo::AcquisitionKind::ei;
      else
        throw ConfigError("bo.acquisition must be noisy-ei or ei");
    }
    if (c.bo.n_init < 1 || c.bo.n_iter < 0 || c.bo.n_mc < 1) throw ConfigError("bo budget values out of range");
    if (c.bo.noise_c < 0.0) throw ConfigError("bo.noise_c must be non-negative");
  }
  if (j.contains("baseline")) {
    const auto& b = j["baseline"];
    detail::check_keys(b, {"grid", "expected_argmin"}, "baseline");
    detail::maybe(b, "grid", c.baseline.grid, "baseline");
    if (b.contains("expected_argmin"))
      c.baseline.expected_argmin = detail::design_from_json(b["expected_argmin"], "baseline.expected_argmin");
    if (c.baseline.grid < 2) throw ConfigError("baseline.grid must be >= 2");
  }
  if (j.contains("verify")) {
    const auto& b = j["verify"];
    detail::check_keys(b, {"grid", "n_t", "eps"}, "verify");
    detail::maybe(b, "grid", c.verify.grid, "verify");
    detail::maybe(b, "n_t", c.verify.n_t, "verify");
    detail::maybe(b, "eps", c.verify.eps, "verify");
    if (c.verify.grid < 2 || c.verify.n_t < 2 || !(c.verify.eps > 0.0 && c.verify.eps < 1.0))
      throw ConfigError("verify values out of range");
  }
  if (j.contains("plot")) {
    const auto& b = j["plot"];
    detail::check_keys(b, {"landscape_grid", "stderr_grid"}, "plot");
    detail::maybe(b, "landscape_grid", c.plot.landscape_grid, "plot");
    detail::maybe(b, "stderr_grid", c.plot.stderr_grid, "plot");
    if (c.plot.landscape_grid < 2 || c.plot.stderr_grid < 0 || c.plot.stderr_grid == 1)
      throw ConfigError("plot grid sizes out of range");
  }
  if (j.contains("designs")) {
    if (!j["designs"].is_array()) throw ConfigError("designs must be an array");
    for (const auto& d : j["designs"]) c.designs.push_back(detail::design_from_json(d, "designs[]"));
  }
  detail::maybe(j, "vqls_seeds", c.vqls_seeds, "config");
  if (c.vqls_seeds < 1) throw ConfigError("vqls_seeds must be >= 1");
  detail::maybe(j, "oracle_injection", c.oracle_injection, "config");
  for (const auto& d : c.designs)
    if (!c.problem.contains(d)) throw ConfigError("design outside the problem bounds");
  return c;
}

inline ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

inline ExperimentConfig parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

/// Echo of the effective configuration, written next to the outputs.
inline json to_json(const ExperimentConfig& c) {
  const auto& p = c.problem;
  json shots = c.vqls.shots ? json(*c.vqls.shots) : json("exact");
  return json{
      {"mode", to_string(c.mode)},
      {"seed", c.seed},
      {"problem",
       {{"n_x", p.n_x},
        {"n_t", p.n_t},
        {"dt", p.dt},
        {"conductivity", p.conductivity},
        {"flux", p.flux},
        {"initial_temps", std::vector<double>(p.initial_temps.data(), p.initial_temps.data() + p.initial_temps.size())},
        {"bounds", {{"l_min", p.bounds.l_min}, {"l_max", p.bounds.l_max}, {"alpha_min", p.bounds.alpha_min},
                    {"alpha_max", p.bounds.alpha_max}}},
        {"weights", {{"w1", p.weights.w1}, {"w2", p.weights.w2}, {"w3", p.weights.w3}}},
        {"scheme", pde::to_string(c.scheme)}}},
      {"vqls",
       {{"cost", vqls::to_string(c.vqls.cost_variant)},
        {"gamma", c.vqls.gamma},
        {"shots", shots},
        {"max_iters", c.vqls.max_iters},
        {"optimizer", c.vqls.optimizer == vqls::OptimizerKind::adagrad ? "adagrad" : "cobyla"},
        {"step", c.vqls.adagrad_step},
        {"layers", c.vqls.layers},
        {"init_beta", {c.vqls.init_a, c.vqls.init_b}},
        {"evaluator", c.vqls.evaluator == vqls::EvaluatorKind::statevector ? "statevector" : "hadamard"},
        {"trust_radius", {c.vqls.trust_radius_start, c.vqls.trust_radius_end}}}},
      {"bo",
       {{"n_init", c.bo.n_init},
        {"n_iter", c.bo.n_iter},
        {"n_mc", c.bo.n_mc},
        {"noise_c", c.bo.noise_c},
        {"seed", c.bo_seed()},
        {"acquisition", c.bo.acquisition == bo::AcquisitionKind::noisy_ei ? "noisy-ei" : "ei"}}},
      {"oracle_injection", c.oracle_injection}};
}

}  // namespace bvq::config
