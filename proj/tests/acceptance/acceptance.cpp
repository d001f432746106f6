// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "bvq/bvq.hpp"

using namespace bvq;
namespace ex = bvq::experiment;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Vector random_angles(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  Vector t(n);
  for (int i = 0; i < n; ++i) t(i) = u(rng);
  return t;
}

std::vector<pde::DesignPoint> grid5() {
  std::vector<pde::DesignPoint> g;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) g.push_back({2.0 + 0.5 * i, 0.2 + 0.025 * j});
  return g;
}

config::ExperimentConfig reference_config(const char* mode) {
  return config::parse(std::string(R"({"seed": 1, "mode": ")") + mode + R"("})");
}

// 1
Outcome classical_baseline() {
  auto c = reference_config("classical-baseline");
  c.baseline.expected_argmin = pde::DesignPoint{2.90, 0.278};
  const auto t0 = Clock::now();
  const auto r = ex::run_baseline(c);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = r.check_passed && r.grid.values.size() == 41 * 41 && secs < 60.0;
  o.detail = fmt("argmin (%.4f, %.5f) cost %.6f in %.2fs", r.grid.argmin.l, r.grid.argmin.alpha, r.grid.min_value, secs);
  return o;
}

// 2
Outcome design_study() {
  auto c = reference_config("bvqpco");
  c.bo.n_init = 10;
  c.bo.n_iter = 20;
  const double opt = ex::classical_grid(c.problem, c.scheme, 41).min_value;
  const auto t0 = Clock::now();
  int hits = 0;
  std::ostringstream per;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    c.seed = s;
    const auto r = ex::run_bvqpco(c);
    const double gap = r.best_classical_cost / opt - 1.0;
    hits += gap <= 0.01;
    per << fmt(" s%llu:%.2f%%", static_cast<unsigned long long>(s), 100.0 * gap);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = hits >= 3 && secs < 1800.0;
  o.detail = fmt("%d/5 seeds within 1%% of %.6f in %.0fs;", hits, opt, secs) + per.str();
  return o;
}

// 3
Outcome reference_vqls() {
  auto c = reference_config("vqls-only");
  c.vqls_seeds = 5;
  Outcome o;
  for (const pde::DesignPoint d : {pde::DesignPoint{4.0, 0.2}, pde::DesignPoint{2.0, 0.3}}) {
    const auto r = ex::run_vqls_only(c, {d}).front();
    bool local_ok = false;
    for (const auto& b : r.fidelity_bounds)
      if (b.quantity == "fidelity_vs_local_cost") local_ok = b.satisfied;
    o.pass = o.pass && r.cost_g < 2e-2 && local_ok;
    o.detail += fmt("(%.1f, %.2f) C_g %.3e C_l %.3e infidelity %.3e local bound %s; ", d.l, d.alpha, r.cost_g, r.cost_l,
                    r.infidelity, local_ok ? "ok" : "violated");
  }
  return o;
}

// 4
Outcome lcu_counts() {
  const pde::DesignPoint d{3.0, 0.25};
  Outcome o;
  auto check = [&](int n_x, int n_t, int expected) {
    const Matrix a = pde::assemble(pde::make_problem(n_x, n_t, 0.25, 1.0, 50.0), d, pde::Scheme::implicit_euler).matrix;
    const auto lcu = lcu::decompose_sliced(a);
    const double err = (lcu::reconstruct(lcu) - a.cast<Complex>()).cwiseAbs().maxCoeff();
    if (expected > 0) o.pass = o.pass && static_cast<int>(lcu.size()) == expected;
    o.pass = o.pass && err < 1e-12;
    o.detail += fmt("(%d,%d): %zu terms%s err %.1e; ", n_x, n_t, lcu.size(), expected > 0 ? "" : " [info]", err);
  };
  check(2, 4, 14);
  check(4, 4, 26);
  check(4, 8, 54);
  check(8, 4, 0);
  return o;
}

struct ReferenceSystem {
  lcu::LcuDecomposition a;
  quantum::Circuit b{1};
  CMatrix dense;
  CMatrix ub;
};

ReferenceSystem reference_system() {
  const auto p = pde::reference_problem();
  const pde::DesignPoint d{3.0, 0.25};
  const auto s = pde::assemble(p, d, pde::Scheme::implicit_euler);
  ReferenceSystem r;
  r.a = lcu::decompose_sliced(s.matrix);
  r.b = quantum::prepare_b(s.rhs, p.n_x, p.n_t);
  r.dense = s.matrix.cast<Complex>();
  r.ub = quantum::circuit_unitary(r.b);
  return r;
}

// 5
Outcome cost_inequalities() {
  const auto sys = reference_system();
  vqls::CostFunction f(sys.a, sys.b, 1);
  const int n = f.n_qubits();
  std::mt19937_64 rng(5);
  int bad = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto c = f.all(random_angles(f.n_params(), rng));
    const double v = std::max({c.ul - c.ug, c.ug - n * c.ul, c.l - c.g, c.g - n * c.l, -c.l, -c.ul});
    worst = std::max(worst, v);
    bad += v > 1e-10;
  }
  return {bad == 0, fmt("%d qubits, 100 angle sets, %d violations, worst slack %.2e", n, bad, worst)};
}

// Posterior from the explicit inverse in extended precision.
bo::Prediction direct_predict(const bo::GpModel& m, const Vector& p) {
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const Eigen::Index n = m.x.rows();
  LMatrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = m.kernel(m.x.row(i).transpose(), m.x.row(j).transpose());
  k.diagonal() += m.noise.cast<long double>();
  k.diagonal().array() += m.jitter;
  const LMatrix inv = k.fullPivLu().inverse();
  const LVector ones = LVector::Ones(n), y = m.y.cast<long double>();
  const long double mean = ones.dot(inv * y) / ones.dot(inv * ones);
  const Vector u = m.normalize(p);
  LVector ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = m.kernel(m.x.row(i).transpose(), u);
  const LVector r = (y.array() - mean).matrix();
  return {static_cast<double>(mean + ks.dot(inv * r)), static_cast<double>(m.kernel.signal_var - ks.dot(inv * ks))};
}

// 6
Outcome simulator_agreement() {
  const auto sys = reference_system();
  vqls::CostFunction ht(sys.a, sys.b, 1, vqls::EvaluatorKind::hadamard);
  const auto h = vqls::dense_hamiltonians(sys.dense, sys.ub);
  std::mt19937_64 rng(6);
  double cost_err = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Vector theta = random_angles(ht.n_params(), rng);
    const CVector psi = quantum::ansatz_state(theta, ht.n_qubits(), 1).amplitudes;
    const double dense = psi.dot(h.h_g * psi).real() / psi.dot(h.a_dag_a * psi).real();
    cost_err = std::max(cost_err, std::abs(ht(theta, vqls::CostVariant::g) - dense));
  }

  std::uniform_real_distribution<double> u;
  Vector lo(2), hi(2);
  lo << 2.0, 0.2;
  hi << 4.0, 0.3;
  double gp_err = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 10 + 5 * rep;
    Matrix x(n, 2);
    Vector y(n), noise(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 2 + 2 * u(rng);
      x(i, 1) = 0.2 + 0.1 * u(rng);
      y(i) = design::design_cost_classical({x(i, 0), x(i, 1)}, pde::reference_problem());
      noise(i) = 1e-4 * u(rng);
    }
    const auto m = bo::gp_fit(x, y, noise, lo, hi, {.restarts = 3, .seed = static_cast<std::uint64_t>(rep)});
    for (int t = 0; t < 10; ++t) {
      Vector p(2);
      p << 2 + 2 * u(rng), 0.2 + 0.1 * u(rng);
      const auto a = bo::gp_predict(m, p), b = direct_predict(m, p);
      gp_err = std::max({gp_err, std::abs(a.mean - b.mean) / std::max(1.0, std::abs(b.mean)),
                         std::abs(a.var - std::max(0.0, b.var)) / std::max(1.0, m.kernel.signal_var)});
    }
  }

  const auto p = pde::reference_problem();
  double march_err = 0.0;
  for (const auto& d : grid5())
    for (auto s : {pde::Scheme::implicit_euler, pde::Scheme::explicit_euler}) {
      pde::LinearSystem sys2;
      try {
        sys2 = pde::assemble(p, d, s);
      } catch (const StabilityError&) {
        continue;
      }
      const Vector xs = pde::classical_solve(sys2);
      const Vector ym = pde::classical_time_march(p, d, s).flatten();
      march_err = std::max(march_err, (xs - ym).cwiseAbs().maxCoeff() / xs.cwiseAbs().maxCoeff());
    }
  return {cost_err <= 1e-10 && gp_err <= 1e-10 && march_err <= 1e-10,
          fmt("hadamard vs dense C_g %.1e, gp vs direct %.1e, march vs solve %.1e", cost_err, gp_err, march_err)};
}

// 7
Outcome condition_bounds() {
  const auto prob = bounds::with_time_levels(pde::reference_problem(), 32);
  int checked = 0, bad = 0;
  double worst = 0.0;
  for (const auto& d : grid5()) {
    const auto ode = bounds::heat_ode(prob, d);
    const double nu = ode.nu(), h = prob.dt, T = prob.horizon();
    const bool contraction = bounds::inverse_norm(Matrix::Identity(prob.n_x, prob.n_x) - h * ode.a) <= 1.0 + 1e-12;
    if (h * nu <= 2.0) {
      const double k = bounds::condition_number(bounds::block_matrix(ode.a, h, prob.n_t, pde::Scheme::explicit_euler));
      const double b = bounds::kappa_bound_explicit(nu, T, h);
      worst = std::max(worst, k / b);
      bad += k > b;
      ++checked;
    }
    if (h * nu <= 0.5) {
      const double k = bounds::condition_number(bounds::block_matrix(ode.a, h, prob.n_t, pde::Scheme::implicit_euler));
      const double b = bounds::kappa_bound_implicit(nu, T, h, contraction);
      worst = std::max(worst, k / b);
      bad += k > b;
      ++checked;
    }
  }
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  double id = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index dim = Eigen::Index{1} << (1 + i % 5);
    CVector a(dim), b(dim);
    for (Eigen::Index j = 0; j < dim; ++j) a(j) = {nd(rng), nd(rng)}, b(j) = {nd(rng), nd(rng)};
    id = std::max(id, bounds::trace_l2_identity_check(a / a.norm(), b / b.norm()));
  }
  return {bad == 0 && checked >= 25 && id <= 1e-12,
          fmt("%d bound checks, %d violated, max kappa/bound %.3f; trace/l2 identity %.1e", checked, bad, worst, id)};
}

// 8
Outcome gradients_and_sampling() {
  const auto p = pde::make_problem(2, 4, 0.25, 1.0, 50.0);
  const auto s = pde::assemble(p, {2.2, 0.27}, pde::Scheme::implicit_euler);
  vqls::CostFunction f(lcu::decompose_sliced(s.matrix), quantum::prepare_b(s.rhs, p.n_x, p.n_t), 2);
  std::mt19937_64 rng(8);
  double grad_err = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const Vector theta = random_angles(f.n_params(), rng);
    for (auto v : {vqls::CostVariant::ug, vqls::CostVariant::g, vqls::CostVariant::ul, vqls::CostVariant::l}) {
      const Vector g = f.gradient(theta, v);
      const double h = 1e-5;
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        Vector tp = theta, tm = theta;
        tp(j) += h;
        tm(j) -= h;
        grad_err = std::max(grad_err, std::abs(g(j) - (f(tp, v) - f(tm, v)) / (2 * h)));
      }
    }
  }

  std::normal_distribution<double> nd;
  std::vector<double> z(1000000);
  for (auto& v : z) v = nd(rng);
  double ei_err = 0.0;
  for (double mu : {-1.0, 0.0, 0.5})
    for (double sigma : {0.3, 1.0, 2.0}) {
      double acc = 0.0;
      for (double v : z) acc += std::max(0.0, -(mu + sigma * v));
      ei_err = std::max(ei_err, std::abs(bo::expected_improvement(mu, sigma, 0.0) - acc / z.size()));
    }

  const auto base = pde::reference_problem();
  const auto ode = bounds::heat_ode(base, {3.0, 0.25});
  double lo_ratio = 1e300, hi_ratio = 0.0, prev = 0.0;
  for (int m : {17, 33, 65, 129}) {
    const double h = base.horizon() / (m - 1);
    const double e = bounds::max_level_error(bounds::exact_solution(ode, h, m),
                                             bounds::euler_solution(ode, h, m, pde::Scheme::implicit_euler), base.n_x);
    if (prev > 0.0) lo_ratio = std::min(lo_ratio, prev / e), hi_ratio = std::max(hi_ratio, prev / e);
    prev = e;
  }
  return {grad_err <= 1e-6 && ei_err <= 2e-3 && lo_ratio >= 1.6 && hi_ratio <= 2.4,
          fmt("parameter shift vs fd %.1e, EI vs MC %.1e, Euler halving ratio %.2f..%.2f", grad_err, ei_err, lo_ratio,
              hi_ratio)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"classical baseline", classical_baseline},
      {"design study over 5 seeds", design_study},
      {"VQLS on reference designs", reference_vqls},
      {"LCU term counts", lcu_counts},
      {"cost inequalities", cost_inequalities},
      {"simulator and model agreement", simulator_agreement},
      {"condition-number bounds", condition_bounds},
      {"gradients, EI and Euler order", gradients_and_sampling},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
