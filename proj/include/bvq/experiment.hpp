#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvq/bayes_opt.hpp"
#include "bvq/config.hpp"
#include "bvq/design_objective.hpp"
#include "bvq/error_bounds.hpp"
#include "bvq/pauli_lcu.hpp"
#include "bvq/pde_model.hpp"
#include "bvq/quantum_kernel.hpp"
#include "bvq/vqls.hpp"

namespace bvq::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  os.precision(12);
  return os;
}

// ---- classical landscape ---------------------------------------------------------

struct GridResult {
  std::vector<double> ls, alphas;
  Matrix values;  // values(i, j) at (ls[i], alphas[j])
  pde::DesignPoint argmin;
  double min_value = 0.0;
  double seconds = 0.0;
};

inline std::vector<double> axis(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

template <typename F>
GridResult grid_map(const pde::Bounds& b, int nl, int na, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  GridResult g;
  g.ls = axis(b.l_min, b.l_max, nl);
  g.alphas = axis(b.alpha_min, b.alpha_max, na);
  g.values.resize(nl, na);
  g.min_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < na; ++j) {
      const double v = f(pde::DesignPoint{g.ls[i], g.alphas[j]});
      g.values(i, j) = v;
      if (v < g.min_value) {
        g.min_value = v;
        g.argmin = {g.ls[i], g.alphas[j]};
      }
    }
  g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return g;
}

inline GridResult classical_grid(const pde::HeatProblem& problem, pde::Scheme scheme, int n) {
  return grid_map(problem.bounds, n, n, [&](const pde::DesignPoint& d) { return design::design_cost_classical(d, problem, scheme); });
}

inline bool within_one_cell(const pde::DesignPoint& a, const pde::DesignPoint& b, const pde::Bounds& bounds, int n) {
  const double cl = (bounds.l_max - bounds.l_min) / (n - 1), ca = (bounds.alpha_max - bounds.alpha_min) / (n - 1);
  return std::abs(a.l - b.l) <= cl * (1 + 1e-9) && std::abs(a.alpha - b.alpha) <= ca * (1 + 1e-9);
}

inline void write_grid_csv(std::ostream& os, const GridResult& g, const std::string& name) {
  os << "l,alpha," << name << '\n';
  for (std::size_t i = 0; i < g.ls.size(); ++i)
    for (std::size_t j = 0; j < g.alphas.size(); ++j) os << g.ls[i] << ',' << g.alphas[j] << ',' << g.values(i, j) << '\n';
}

struct BaselineResult {
  GridResult grid;
  bool check_passed = true;  // expected_argmin check, when configured
};

inline BaselineResult run_baseline(const config::ExperimentConfig& cfg, const std::optional<fs::path>& out = {}) {
  BaselineResult r;
  r.grid = classical_grid(cfg.problem, cfg.scheme, cfg.baseline.grid);
  if (cfg.baseline.expected_argmin)
    r.check_passed = within_one_cell(r.grid.argmin, *cfg.baseline.expected_argmin, cfg.problem.bounds, cfg.baseline.grid);
  if (out) {
    auto os = open_out(*out / "baseline_grid.csv");
    write_grid_csv(os, r.grid, "cost");
    auto js = open_out(*out / "baseline.json");
    json j{{"grid", cfg.baseline.grid},
           {"argmin", {{"l", r.grid.argmin.l}, {"alpha", r.grid.argmin.alpha}}},
           {"min_cost", r.grid.min_value}};
    if (cfg.baseline.expected_argmin)
      j["expected_argmin_check"] = r.check_passed;
    js << j.dump(2) << '\n';
  }
  return r;
}

// ---- bi-level loop ---------------------------------------------------------------

struct RunSummary {
  bo::BoState state;
  std::vector<design::Evaluation> evals;
  int recommended = -1;  // evaluation index returned as the design
  pde::DesignPoint best;
  double best_cost = 0.0;            // cost the loop observed there
  double best_classical_cost = 0.0;  // ground truth at the same design
  int failures = 0;
  double seconds = 0.0;
};

/// Evaluated design with the lowest posterior mean (lowest observation when there is no surrogate).
inline int recommend(const bo::BoState& s) {
  if (!s.model) return s.best_index;
  int best = -1;
  double bv = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.records.size(); ++k) {
    if (!s.records[k].ok) continue;
    const double m = bo::gp_predict(*s.model, s.records[k].x).mean;
    if (m < bv) {
      bv = m;
      best = static_cast<int>(k);
    }
  }
  return best;
}

inline void write_evaluations(std::ostream& os, const std::vector<design::Evaluation>& ev) {
  os << "eval,l,alpha,ratio,cost,std_error,source,vqls_final_cost,ok\n";
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const auto& e = ev[k];
    os << k << ',' << e.design.l << ',' << e.design.alpha << ',';
    if (e.ok)
      os << e.ratio << ',' << e.cost << ',' << e.std_error;
    else
      os << "nan,nan,nan";
    os << ',' << e.source << ',' << e.vqls_final_cost << ',' << (e.ok ? 1 : 0) << '\n';
  }
}

inline void write_histories(std::ostream& os, const std::vector<design::Evaluation>& ev) {
  os << "eval,iter,cost\n";
  for (std::size_t k = 0; k < ev.size(); ++k)
    if (ev[k].vqls)
      for (std::size_t i = 0; i < ev[k].vqls->cost_history.size(); ++i)
        os << k << ',' << i << ',' << ev[k].vqls->cost_history[i] << '\n';
}

inline bo::BoConfig bo_config(const config::ExperimentConfig& cfg) {
  bo::BoConfig b;
  b.n_init = cfg.bo.n_init;
  b.n_iter = cfg.bo.n_iter;
  b.n_mc = cfg.bo.n_mc;
  b.acquisition = cfg.bo.acquisition;
  b.seed = cfg.bo_seed();
  return b;
}

inline RunSummary run_bvqpco(const config::ExperimentConfig& cfg, const std::optional<fs::path>& out = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  design::DesignEvaluator ev(cfg.problem, cfg.vqls, cfg.scheme, cfg.bo.noise_c);
  ev.set_oracle_injection(cfg.oracle_injection);
  RunSummary r;
  const int budget = cfg.bo.n_init + cfg.bo.n_iter;
  auto objective = [&](const Vector& x, int k) {
    design::Evaluation e = ev.evaluate({x(0), x(1)}, mix_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    if (!e.ok && 2 * (++r.failures) > budget)
      throw NumericalError("more than half of the design evaluations failed; last error: " + e.error);
    bo::Observation o{e.cost, e.std_error, e.ok};
    r.evals.push_back(std::move(e));
    return o;
  };
  const auto& b = cfg.problem.bounds;
  Vector lo(2), hi(2);
  lo << b.l_min, b.alpha_min;
  hi << b.l_max, b.alpha_max;
  r.state = bo::bo_loop(objective, lo, hi, bo_config(cfg));
  r.recommended = recommend(r.state);
  if (r.recommended < 0) throw NumericalError("no successful design evaluation");
  const auto& rec = r.state.records[r.recommended];
  r.best = {rec.x(0), rec.x(1)};
  r.best_cost = rec.mean;
  r.best_classical_cost = design::design_cost_classical(r.best, cfg.problem, cfg.scheme);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (out) {
    auto cj = open_out(*out / "config.json");
    cj << config::to_json(cfg).dump(2) << '\n';
    auto tr = open_out(*out / "trace.csv");
    r.state.write_trace(tr, {"l", "alpha"});
    auto ec = open_out(*out / "evaluations.csv");
    write_evaluations(ec, r.evals);
    auto hc = open_out(*out / "vqls_history.csv");
    write_histories(hc, r.evals);
    auto bj = open_out(*out / "best.json");
    bj << json{{"eval", r.recommended},
               {"l", r.best.l},
               {"alpha", r.best.alpha},
               {"cost", r.best_cost},
               {"classical_cost", r.best_classical_cost},
               {"failures", r.failures}}
              .dump(2)
       << '\n';
  }
  return r;
}

// ---- single-system VQLS ------------------------------------------------------------

struct VqlsReport {
  pde::DesignPoint design;
  vqls::VqlsResult result;
  std::uint64_t seed = 0;
  double cost_g = 0.0;
  double cost_l = 0.0;
  double infidelity = 0.0;  // 1 - |<psi_cl|psi>|^2
  std::vector<bounds::BoundReport> fidelity_bounds;
  Vector classical;
};

/// Solves A(d) psi = b(d) with `seeds` restarts and keeps the lowest final cost.
inline VqlsReport solve_design(const pde::HeatProblem& problem, pde::Scheme scheme, const pde::DesignPoint& d,
                               vqls::VqlsConfig vcfg, std::uint64_t seed, int seeds) {
  const auto sys = pde::assemble(problem, d, scheme);
  const lcu::LcuDecomposition a = lcu::decompose_sliced(lcu::pad_matrix(sys.matrix));
  const Vector b = lcu::pad_vector(sys.rhs);
  const quantum::Circuit bc = quantum::prepare_b(b, problem.n_x, problem.n_t);
  VqlsReport rep;
  rep.design = d;
  bool have = false;
  for (int s = 0; s < seeds; ++s) {
    vcfg.seed = mix_seed(seed, static_cast<std::uint64_t>(s));
    auto r = vqls::solve(a, bc, vcfg);
    if (!have || r.final_cost < rep.result.final_cost) {
      rep.result = std::move(r);
      rep.seed = vcfg.seed;
      have = true;
    }
  }
  vqls::CostFunction f(a, bc, vcfg.layers);
  const auto all = f.all(rep.result.theta_star);
  rep.cost_g = all.g;
  rep.cost_l = all.l;
  const Matrix dense = lcu::pad_matrix(sys.matrix);
  const Vector x = dense.partialPivLu().solve(b);
  rep.classical = pde::classical_solve(sys);
  const CVector xc = (x / x.norm()).cast<Complex>();
  const CVector& psi = rep.result.solution_state.amplitudes;
  rep.infidelity = std::max(0.0, 1.0 - std::norm(xc.dot(psi)));
  rep.fidelity_bounds = bounds::cost_error_reports(dense, psi, xc, all.g, all.l);
  return rep;
}

inline void write_profiles(std::ostream& os, const pde::HeatProblem& p, const VqlsReport& r) {
  // quantum temperatures rescaled to the classical norm with the sign of the overlap
  const Eigen::Index n = r.classical.size();
  Vector q = r.result.solution_state.amplitudes.head(n).real();
  const double s = q.dot(r.classical) >= 0.0 ? 1.0 : -1.0;
  q *= s * r.classical.norm() / std::max(q.norm(), 1e-300);
  os << "t,x,T_classical,T_quantum\n";
  for (int k = 0; k < p.n_t; ++k)
    for (int i = 0; i < p.n_x; ++i)
      os << k * p.dt << ',' << r.design.l * i * p.dy() << ',' << r.classical(k * p.n_x + i) << ',' << q(k * p.n_x + i) << '\n';
}

inline std::vector<VqlsReport> run_vqls_only(const config::ExperimentConfig& cfg, std::vector<pde::DesignPoint> designs,
                                             const std::optional<fs::path>& out = {}) {
  if (designs.empty()) designs = cfg.designs;
  if (designs.empty()) throw ConfigError("vqls-only needs at least one design");
  std::vector<VqlsReport> reps;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    reps.push_back(solve_design(cfg.problem, cfg.scheme, designs[i], cfg.vqls, mix_seed(cfg.seed, 1000 + i), cfg.vqls_seeds));
    if (!out) continue;
    const auto& r = reps.back();
    const std::string tag = "design" + std::to_string(i);
    auto h = open_out(*out / (tag + "_history.csv"));
    h << "iter,cost\n";
    for (std::size_t k = 0; k < r.result.cost_history.size(); ++k) h << k << ',' << r.result.cost_history[k] << '\n';
    auto pr = open_out(*out / (tag + "_profiles.csv"));
    write_profiles(pr, cfg.problem, r);
    auto tj = open_out(*out / (tag + "_theta.json"));
    tj << json{{"l", r.design.l},
               {"alpha", r.design.alpha},
               {"seed", r.seed},
               {"theta", std::vector<double>(r.result.theta_star.data(), r.result.theta_star.data() + r.result.theta_star.size())},
               {"final_cost", r.result.final_cost},
               {"iterations", r.result.iterations_used},
               {"C_g", r.cost_g},
               {"C_l", r.cost_l},
               {"infidelity", r.infidelity},
               {"bounds", bounds::to_json(r.fidelity_bounds)}}
              .dump(2)
       << '\n';
  }
  return reps;
}

// ---- bound verification ------------------------------------------------------------

struct VerifyResult {
  std::vector<bounds::BoundReport> coarse;  // the configured problem
  std::vector<bounds::BoundReport> fine;    // same horizon, finer step
  bool ok() const { return bounds::all_satisfied(coarse) && bounds::all_satisfied(fine); }
};

inline std::vector<pde::DesignPoint> design_grid(const pde::Bounds& b, int n) {
  std::vector<pde::DesignPoint> g;
  for (double l : axis(b.l_min, b.l_max, n))
    for (double a : axis(b.alpha_min, b.alpha_max, n)) g.push_back({l, a});
  return g;
}

inline VerifyResult run_verify(const config::ExperimentConfig& cfg, const std::optional<fs::path>& out = {}) {
  VerifyResult r;
  const auto grid = design_grid(cfg.problem.bounds, cfg.verify.grid);
  bounds::VerifyOptions opt;
  opt.eps = cfg.verify.eps;
  r.coarse = bounds::verify_bounds(cfg.problem, grid, opt);
  opt.step_check = false;
  r.fine = bounds::verify_bounds(bounds::with_time_levels(cfg.problem, cfg.verify.n_t), grid, opt);
  if (out) {
    auto js = open_out(*out / "bounds.json");
    js << json{{"problem", bounds::to_json(r.coarse)}, {"finer_step", bounds::to_json(r.fine)}}.dump(2) << '\n';
    auto tb = open_out(*out / "bounds.txt");
    tb << "# configured step\n";
    bounds::write_table(tb, r.coarse);
    tb << "\n# finer step, n_t = " << cfg.verify.n_t << "\n";
    bounds::write_table(tb, r.fine);
  }
  return r;
}

// ---- plot data ----------------------------------------------------------------------

struct Series {
  std::string label;
  std::vector<double> x, y;
};

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

/// Minimal SVG line chart; log_y plots log10 of positive values.
inline void write_svg(std::ostream& os, const std::vector<Series>& series, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel, bool log_y) {
  const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto tr = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, tr(s.y[i]));
      y1 = std::max(y1, tr(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (tr(y) - y0) / (y1 - y0) * (h - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' '
     << h << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << h / 2
     << ")\">" << xml_escape(ylabel) << (log_y ? " (log10)" : "") << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y0 + (y1 - y0) * t / 4.0, ypix = h - mb - (h - mt - mb) * t / 4.0;
    const double xv = x0 + (x1 - x0) * t / 4.0, xpix = ml + (w - ml - mr) * t / 4.0;
    os << "<text x=\"" << ml - 6 << "\" y=\"" << ypix + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << yv << "</text>\n";
    os << "<text x=\"" << xpix << "\" y=\"" << h - mb + 14 << "\" text-anchor=\"middle\" font-size=\"10\">" << xv << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << colors[k % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << w - mr - 150 << "\" y=\"" << mt + 14 * (k + 1) << "\" font-size=\"11\" fill=\"" << colors[k % 6]
       << "\">" << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

/// Reads a numeric CSV with a header row; non-numeric cells become NaN.
inline std::vector<std::vector<double>> read_csv(const fs::path& p, std::vector<std::string>* header = nullptr) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read '" + p.string() + "'");
  std::string line;
  std::getline(in, line);
  if (header) {
    header->clear();
    std::stringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');) header->push_back(c);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) {
      try {
        std::size_t used = 0;
        const double v = std::stod(c, &used);
        row.push_back(used == c.size() ? v : std::nan(""));
      } catch (const std::exception&) {
        row.push_back(std::nan(""));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Plot files from the artifacts present in `dir`: cost histories, best-so-far curve and
/// landscape grids. Returns the files written.
inline std::vector<fs::path> emit_plots(const config::ExperimentConfig& cfg, const fs::path& dir) {
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& p, const std::vector<Series>& s, const std::string& t, const std::string& xl,
                  const std::string& yl, bool lg) {
    auto os = open_out(p);
    write_svg(os, s, t, xl, yl, lg);
    written.push_back(p);
  };

  if (fs::exists(dir / "vqls_history.csv")) {
    std::vector<Series> s;
    for (const auto& row : read_csv(dir / "vqls_history.csv")) {
      const std::string label = "eval " + std::to_string(static_cast<int>(row[0]));
      if (s.empty() || s.back().label != label) s.push_back({label, {}, {}});
      s.back().x.push_back(row[1]);
      s.back().y.push_back(row[2]);
    }
    if (s.size() > 6) s.resize(6);
    emit(dir / "vqls_history.svg", s, "VQLS cost history", "iteration", "cost", true);
  }
  for (int i = 0; fs::exists(dir / ("design" + std::to_string(i) + "_history.csv")); ++i) {
    Series s{"design " + std::to_string(i), {}, {}};
    for (const auto& row : read_csv(dir / ("design" + std::to_string(i) + "_history.csv"))) {
      s.x.push_back(row[0]);
      s.y.push_back(row[1]);
    }
    emit(dir / ("design" + std::to_string(i) + "_history.svg"), {s}, "VQLS cost history", "iteration", "cost", true);
  }
  if (fs::exists(dir / "trace.csv")) {
    std::vector<std::string> hdr;
    const auto rows = read_csv(dir / "trace.csv", &hdr);
    Series best{"best so far", {}, {}}, obs{"observed", {}, {}};
    auto best_col = std::find(hdr.begin(), hdr.end(), "best_so_far") - hdr.begin();
    auto mean_col = std::find(hdr.begin(), hdr.end(), "cost_mean") - hdr.begin();
    auto out = open_out(dir / "best_so_far.csv");
    out << "iter,best_so_far\n";
    for (const auto& row : rows) {
      best.x.push_back(row[0]);
      best.y.push_back(row[best_col]);
      obs.x.push_back(row[0]);
      obs.y.push_back(row[mean_col]);
      out << row[0] << ',' << row[best_col] << '\n';
    }
    written.push_back(dir / "best_so_far.csv");
    emit(dir / "best_so_far.svg", {obs, best}, "Design cost", "evaluation", "cost", false);
  }

  const int n = cfg.plot.landscape_grid;
  auto grid = classical_grid(cfg.problem, cfg.scheme, n);
  {
    auto os = open_out(dir / "landscape_cost.csv");
    write_grid_csv(os, grid, "cost");
    written.push_back(dir / "landscape_cost.csv");
  }
  if (cfg.plot.stderr_grid >= 2) {
    design::DesignEvaluator ev(cfg.problem, cfg.vqls, cfg.scheme, cfg.bo.noise_c);
    std::uint64_t k = 0;
    auto g = grid_map(cfg.problem.bounds, cfg.plot.stderr_grid, cfg.plot.stderr_grid, [&](const pde::DesignPoint& d) {
      auto e = ev.evaluate(d, mix_seed(cfg.seed, 5000 + k++));
      return e.ok ? e.std_error : std::nan("");
    });
    auto os = open_out(dir / "landscape_stderr.csv");
    write_grid_csv(os, g, "std_error");
    written.push_back(dir / "landscape_stderr.csv");
  }
  return written;
}

}  // namespace bvq::experiment
