#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "bvq/config.hpp"
#include "bvq/experiment.hpp"

namespace ex = bvq::experiment;
namespace cfgns = bvq::config;

namespace {

constexpr int kOk = 0, kRuntime = 1, kValidation = 2, kCheckFailed = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string shots;
  std::string design;
};

cfgns::ExperimentConfig load(const Options& o) {
  cfgns::ExperimentConfig c;
  if (!o.config_path.empty())
    c = cfgns::load(o.config_path);
  else
    c = cfgns::parse(R"({"seed": 0})");
  if (o.seed) c.seed = *o.seed;
  if (!o.shots.empty()) {
    if (o.shots == "exact") {
      c.vqls.shots.reset();
    } else {
      try {
        std::size_t used = 0;
        const long long n = std::stoll(o.shots, &used);
        if (used != o.shots.size() || n <= 0) throw std::invalid_argument("");
        c.vqls.shots = static_cast<std::uint64_t>(n);
      } catch (const std::exception&) {
        throw bvq::ConfigError("--shots expects a positive integer or 'exact'");
      }
    }
  }
  if (!o.design.empty()) {
    double l = 0, a = 0;
    char tail = 0;
    if (std::sscanf(o.design.c_str(), "%lf,%lf%c", &l, &a, &tail) != 2) throw bvq::ConfigError("--design expects l,alpha");
    if (!c.problem.contains({l, a})) throw bvq::ConfigError("--design lies outside the problem bounds");
    c.designs = {{l, a}};
  }
  return c;
}

int do_baseline(const cfgns::ExperimentConfig& c, const ex::fs::path& out) {
  auto r = ex::run_baseline(c, out);
  std::printf("argmin l=%.4f alpha=%.5f cost=%.6f (%dx%d grid, %.2fs)\n", r.grid.argmin.l, r.grid.argmin.alpha,
              r.grid.min_value, c.baseline.grid, c.baseline.grid, r.grid.seconds);
  if (!r.check_passed) {
    std::printf("argmin is more than one cell away from the expected optimum\n");
    return kCheckFailed;
  }
  return kOk;
}

int do_run(const cfgns::ExperimentConfig& c, const ex::fs::path& out) {
  auto r = ex::run_bvqpco(c, out);
  std::printf("best design l=%.4f alpha=%.5f cost=%.6f classical=%.6f (eval %d, %d failed, %.1fs)\n", r.best.l,
              r.best.alpha, r.best_cost, r.best_classical_cost, r.recommended, r.failures, r.seconds);
  return kOk;
}

int do_vqls(const cfgns::ExperimentConfig& c, const ex::fs::path& out) {
  auto reps = ex::run_vqls_only(c, {}, out);
  for (const auto& r : reps) {
    std::printf("l=%.4f alpha=%.5f final=%.3e iters=%d C_g=%.3e C_l=%.3e infidelity=%.3e\n", r.design.l, r.design.alpha,
                r.result.final_cost, r.result.iterations_used, r.cost_g, r.cost_l, r.infidelity);
    for (const auto& b : r.fidelity_bounds)
      std::printf("  %-26s %.3e <= %.3e %s\n", b.quantity.c_str(), b.computed, b.bound, b.satisfied ? "ok" : "VIOLATED");
  }
  return kOk;
}

int do_verify(const cfgns::ExperimentConfig& c, const ex::fs::path& out) {
  auto r = ex::run_verify(c, out);
  std::cout << "# configured step\n";
  bvq::bounds::write_table(std::cout, r.coarse);
  std::cout << "\n# finer step, n_t = " << c.verify.n_t << "\n";
  bvq::bounds::write_table(std::cout, r.fine);
  return r.ok() ? kOk : kCheckFailed;
}

int do_plot(const cfgns::ExperimentConfig& c, const ex::fs::path& out) {
  for (const auto& p : ex::emit_plots(c, out)) std::cout << p.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-level variational quantum design optimization of a heated plate"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--shots", o.shots, "shots per expectation, or 'exact'");
  };
  auto* run = app.add_subcommand("run", "run the mode named in the config (default bvqpco)");
  auto* baseline = app.add_subcommand("baseline", "classical grid search over the design box");
  auto* vq = app.add_subcommand("vqls", "solve single designs with VQLS");
  auto* verify = app.add_subcommand("verify", "check condition-number and Euler bounds");
  auto* plot = app.add_subcommand("plot", "write SVG and CSV plot data from run artifacts");
  for (auto* s : {run, baseline, vq, verify, plot}) add_common(s);
  vq->add_option("--design", o.design, "design point as l,alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const auto c = load(o);
    const ex::fs::path out = o.out;
    if (*baseline) return do_baseline(c, out);
    if (*vq) return do_vqls(c, out);
    if (*verify) return do_verify(c, out);
    if (*plot) return do_plot(c, out);
    switch (c.mode) {
      case cfgns::Mode::bvqpco: return do_run(c, out);
      case cfgns::Mode::classical_baseline: return do_baseline(c, out);
      case cfgns::Mode::vqls_only: return do_vqls(c, out);
      case cfgns::Mode::verify_bounds: return do_verify(c, out);
    }
  } catch (const bvq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const bvq::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
