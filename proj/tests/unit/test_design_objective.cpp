#include <catch_amalgamated.hpp>

#include "bvq/design_objective.hpp"

using namespace bvq;
using namespace bvq::design;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("selector vectors", "[design]") {
  auto small = build_phi(pde::make_problem(2, 2, 0.25, 1.0, 50.0));
  Vector d(4), n(4);
  d << 0, 1, 0, 1;
  n << 0, 1, 0, 0;
  CHECK(small.phi_d == d);
  CHECK(small.phi_n == n);

  auto s = build_phi(pde::reference_problem());
  CHECK(s.phi_d.sum() == 4.0);
  for (int idx : {7, 15, 23, 31}) CHECK(s.phi_d(idx) == 1.0);
  CHECK_THAT(s.phi_d.norm(), WithinAbs(2.0, 1e-15));
  CHECK(s.phi_n.norm() == 1.0);
  CHECK(s.norm_ratio == 2.0);
}

TEST_CASE("selector picks the trajectory values at x = l", "[design]") {
  auto p = pde::reference_problem();
  const pde::DesignPoint d{2.9, 0.278};
  const Vector u = pde::classical_solve(pde::assemble(p, d, pde::Scheme::implicit_euler));
  const auto tr = pde::classical_time_march(p, d, pde::Scheme::implicit_euler);
  auto s = build_phi(p);
  CHECK_THAT(s.phi_d.dot(u), WithinRel(tr.values.col(7).sum(), 1e-12));
  CHECK_THAT(s.phi_n.dot(u), WithinRel(tr.values(0, 7), 1e-12));
}

TEST_CASE("ratio from a state", "[design]") {
  auto p = pde::reference_problem();
  auto s = build_phi(p);
  const Vector u = pde::classical_solve(pde::assemble(p, {3.3, 0.21}, pde::Scheme::implicit_euler));
  const double direct = s.phi_d.dot(u) / s.phi_n.dot(u);
  const Vector psi = u / u.norm();
  CHECK_THAT(ratio_from_state(psi, s), WithinRel(direct, 1e-9));
  CHECK(ratio_from_state(Vector(-psi), s) == ratio_from_state(psi, s));
  CHECK_THAT(ratio_from_state(Vector(3.7 * psi), s), WithinRel(ratio_from_state(psi, s), 1e-14));

  Vector bad = psi;
  bad(7) = 0.0;
  CHECK_THROWS_AS(ratio_from_state(bad, s), DegenerateDenominator);
}

TEST_CASE("constant field gives ratio M", "[design]") {
  auto p = pde::make_problem(8, 4, 0.25, 1.0, 0.0);
  p.initial_temps = Vector::Constant(8, 290.0);
  CHECK_THAT(classical_ratio(p, {3.0, 0.25}), WithinAbs(4.0, 1e-10));
}

TEST_CASE("design cost formula", "[design]") {
  auto p = pde::reference_problem();
  auto s = build_phi(p);
  const pde::DesignPoint corner{p.bounds.l_min, p.bounds.alpha_max};
  CHECK_THAT(design_cost(4.0, corner, s), WithinAbs(10.0 * 4.0 / 3.0, 1e-12));
  CHECK_THAT(design_cost(4.0, {3.0, 0.25}, s), WithinAbs(10.0 * 4.0 / 3.0 + 0.25 + 5.0 / 36.0, 1e-12));
  // quadratic penalty grows as l leaves l_min
  double prev = -1.0;
  for (double l = 2.0; l <= 4.0; l += 0.25) {
    const double c = design_cost(4.0, {l, 0.3}, s);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("classical landscape optimum", "[design]") {
  auto p = pde::reference_problem();
  double best = 1e300;
  pde::DesignPoint arg;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const pde::DesignPoint d{2.0 + 2.0 * i / 40, 0.2 + 0.1 * j / 40};
      const double c = design_cost_classical(d, p);
      if (c < best) best = c, arg = d;
    }
  CHECK(std::abs(arg.l - 2.90) <= 0.05 + 1e-12);
  CHECK(std::abs(arg.alpha - 0.278) <= 0.0025 + 1e-12);
  // finite differences stay bounded on the grid
  const double h = 1e-6;
  for (double l : {2.0, 3.0, 4.0})
    for (double a : {0.2, 0.25, 0.3}) {
      const double dl = (design_cost_classical({std::min(l + h, 4.0), a}, p) - design_cost_classical({std::max(l - h, 2.0), a}, p)) / (2 * h);
      CHECK(std::abs(dl) < 100.0);
    }
}

TEST_CASE("swap-test ratio agrees for positive states", "[design]") {
  auto p = pde::reference_problem();
  auto s = build_phi(p);
  const Vector u = pde::classical_solve(pde::assemble(p, {2.9, 0.278}, pde::Scheme::implicit_euler));
  const auto prep = quantum::prepare_state_general(u);
  CHECK_THAT(ratio_swap_test(prep, s), WithinRel(ratio_from_state(u, s), 1e-9));
}

TEST_CASE("noise model", "[design]") {
  CHECK_THAT(noise_stderr(0.01, 8), WithinAbs(0.1 * std::sqrt(0.03), 1e-15));
  CHECK(noise_stderr(0.0, 8) == 0.0);
}

TEST_CASE("design evaluator", "[design]") {
  auto p = pde::reference_problem();
  vqls::VqlsConfig cfg;
  DesignEvaluator ev(p, cfg);
  const pde::DesignPoint d{2.9, 0.278};
  ev.set_oracle_injection(true);
  auto oracle = ev.evaluate(d, 0);
  REQUIRE(oracle.ok);
  CHECK_THAT(oracle.cost, WithinRel(design_cost_classical(d, p), 1e-12));
  CHECK(oracle.source == "classical");

  ev.set_oracle_injection(false);
  auto q = ev.evaluate(d, 1);
  REQUIRE(q.ok);
  CHECK(q.source == "quantum");
  CHECK(q.vqls.has_value());
  CHECK(q.vqls_final_cost < 0.05);
  CHECK_THAT(q.cost, WithinRel(oracle.cost, 0.03));
  CHECK(q.std_error > 0.0);
}
