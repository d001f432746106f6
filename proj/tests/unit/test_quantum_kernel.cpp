#include <catch_amalgamated.hpp>

#include <random>

#include "bvq/pauli_lcu.hpp"
#include "bvq/quantum_kernel.hpp"

using namespace bvq;
using namespace bvq::quantum;
using Catch::Matchers::WithinAbs;

namespace {

StateVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(nd(rng), nd(rng));
  return StateVector::from_vector(v);
}

Vector random_angles(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  Vector t(n);
  for (int i = 0; i < n; ++i) t(i) = u(rng);
  return t;
}

Circuit random_circuit(int n, int depth, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 9), qubit(0, n - 1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  Circuit c(n);
  for (int d = 0; d < depth; ++d) {
    Gate g{static_cast<GateKind>(kind(rng)), qubit(rng), -1, ang(rng)};
    if (g.kind == GateKind::SWAP) g.target2 = (g.target + 1) % n;
    if (g.kind == GateKind::Phase) g.target = -1;
    if (d % 3 == 0 && g.kind != GateKind::SWAP && g.kind != GateKind::Phase) {
      const int ctl = (g.target + 1 + d % (n - 1)) % n;
      if (ctl != g.target) g.controls.push_back({ctl, d % 2});
    }
    c.add(g);
  }
  return c;
}

double dense_fidelity(const StateVector& a, const Vector& target) {
  return std::abs(a.amplitudes.dot(target.cast<Complex>() / target.norm()));
}

}  // namespace

TEST_CASE("elementary gates", "[quantum]") {
  Circuit h(1);
  h.h(0);
  auto s = run_circuit(h);
  CHECK_THAT(s.amplitudes(0).real(), WithinAbs(1 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(s.amplitudes(1).real(), WithinAbs(1 / std::sqrt(2.0), 1e-15));

  Circuit sw(2);
  sw.swap(0, 1);
  auto out = run_circuit(sw, StateVector::basis(2, 0b01));
  CHECK(std::abs(out.amplitudes(0b10) - Complex(1.0)) < 1e-15);

  Circuit bad(2);
  bad.x(2);
  CHECK_THROWS_AS(run_circuit(bad), IndexOutOfRange);

  // big-endian: X on qubit 0 flips the most significant bit
  Circuit x0(3);
  x0.x(0);
  CHECK(run_circuit(x0).probability(0b100) == 1.0);

  // controlled-X with control value 0
  Circuit cx(2);
  cx.add({GateKind::X, 1, -1, 0.0, {{0, 0}}});
  CHECK(run_circuit(cx).probability(0b01) == 1.0);
}

TEST_CASE("gate matrices are unitary and match the dense circuit unitary", "[quantum]") {
  for (int k = 0; k < 10; ++k) {
    if (static_cast<GateKind>(k) == GateKind::SWAP || static_cast<GateKind>(k) == GateKind::Phase) continue;
    Circuit c(1);
    c.add({static_cast<GateKind>(k), 0, -1, 0.37});
    CMatrix u = circuit_unitary(c);
    CHECK((u.adjoint() * u - CMatrix::Identity(2, 2)).norm() < 1e-14);
  }
}

TEST_CASE("circuit inverse and unitarity", "[quantum]") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + rep % 4;
    Circuit c = random_circuit(n, 40, rng);
    StateVector psi = random_state(n, rng);
    StateVector out = run_circuit(c, psi);
    CHECK_THAT(out.norm(), WithinAbs(1.0, 1e-10));
    StateVector back = run_circuit(c.inverse(), out);
    CHECK((back.amplitudes - psi.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("controlled circuits act on the control subspace only", "[quantum]") {
  std::mt19937_64 rng(8);
  Circuit u = random_circuit(2, 20, rng);
  u.phase(0.7);
  Circuit cu = u.shifted(1, 3).controlled(0, 1);
  CMatrix big = circuit_unitary(cu), small = circuit_unitary(u);
  CHECK((big.topLeftCorner(4, 4) - CMatrix::Identity(4, 4)).norm() < 1e-14);
  CHECK((big.bottomRightCorner(4, 4) - small).norm() < 1e-14);
  CHECK(big.topRightCorner(4, 4).norm() < 1e-14);
}

TEST_CASE("ansatz", "[quantum]") {
  CHECK_THROWS_AS(ansatz(Vector::Zero(3), 2, 1), InvalidDimension);
  auto s0 = ansatz_state(Vector::Zero(2), 2, 1);
  CHECK_THAT(s0.norm(), WithinAbs(1.0, 1e-14));
  CHECK(s0.amplitudes.imag().cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const int layers = 1 + rep % 4;
    auto s = ansatz_state(random_angles(5 * layers, rng), 5, layers);
    CHECK(s.amplitudes.imag().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THAT(s.norm(), WithinAbs(1.0, 1e-10));
  }
  Circuit c = ansatz(Vector::Constant(6, 0.5), 3, 2);
  CHECK(c.size() == 2 * (3 + 2 + 3));
}

TEST_CASE("parameter shift matches finite differences", "[quantum]") {
  std::mt19937_64 rng(4);
  const int n = 3, layers = 2;
  // Hermitian observable M = random real symmetric
  std::normal_distribution<double> nd;
  Matrix m(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) m(i, j) = nd(rng);
  m = (m + m.transpose()).eval();
  auto f = [&](const Vector& t) {
    auto s = ansatz_state(t, n, layers);
    return (s.amplitudes.adjoint() * m.cast<Complex>() * s.amplitudes)(0).real();
  };
  for (int rep = 0; rep < 10; ++rep) {
    Vector t = random_angles(n * layers, rng);
    Vector g = parameter_shift(f, t);
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      Vector tp = t, tm = t;
      tp(j) += h;
      tm(j) -= h;
      CHECK_THAT(g(j), WithinAbs((f(tp) - f(tm)) / (2 * h), 1e-6));
    }
  }
}

TEST_CASE("general state preparation", "[quantum]") {
  Vector e3 = Vector::Zero(4);
  e3(3) = 1.0;
  CHECK_THAT(overlap(run_circuit(prepare_state_general(e3)), StateVector::basis(2, 3)), WithinAbs(1.0, 1e-12));

  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    Vector v(8);
    for (int i = 0; i < 8; ++i) v(i) = nd(rng);
    if (rep == 0) v(2) = 0.0;
    auto s = run_circuit(prepare_state_general(v));
    CHECK((s.amplitudes - v.cast<Complex>() / v.norm()).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (int rep = 0; rep < 20; ++rep) {
    StateVector target = random_state(4, rng);
    auto s = run_circuit(prepare_state_general(target.amplitudes));
    CHECK((s.amplitudes - target.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(prepare_state_general(Vector::Zero(4)), InvalidArgument);
  CHECK_THROWS_AS(prepare_state_general(Vector::Ones(3)), PaddingRequired);
}

TEST_CASE("hand-crafted rhs preparation", "[quantum]") {
  // three and four qubit cases: (n_x, n_t) = (2, 4) and (4, 4)
  for (auto [nx, nt] : {std::pair{2, 4}, {4, 4}, {8, 4}, {2, 2}}) {
    pde::HeatProblem p = pde::make_problem(nx, nt, 0.25, 1.0, 50.0);
    const pde::DesignPoint d{3.0, 0.25};
    Vector b = pde::build_rhs(p, d);
    Circuit c = prepare_b_handcrafted(p, d);
    auto s = run_circuit(c);
    CHECK((s.amplitudes - b.cast<Complex>() / b.norm()).cwiseAbs().maxCoeff() < 1e-10);
    auto g = run_circuit(prepare_state_general(b));
    CHECK_THAT(overlap(s, g), WithinAbs(1.0, 1e-10));
    CHECK(c.size() <= prepare_state_general(b).size());
  }
  // no flux and a uniform profile: only the H column on the space register
  pde::HeatProblem flat = pde::make_problem(4, 4, 0.25, 1.0, 0.0);
  flat.initial_temps = Vector::Constant(4, 300.0);
  Circuit c = prepare_b_handcrafted(flat, {3.0, 0.25});
  REQUIRE(c.size() == 2);
  for (const auto& g : c.gates) {
    CHECK(g.kind == GateKind::H);
    CHECK(g.controls.empty());
    CHECK(g.target >= 2);
  }
  Vector b = Vector::Zero(16);
  b(0) = 1;
  b(5) = 1;
  CHECK_THROWS_AS(prepare_b_handcrafted(b, 4, 4), StructureMismatch);
  auto fallback = run_circuit(prepare_b(b, 4, 4));
  CHECK((fallback.amplitudes - b.cast<Complex>() / b.norm()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hadamard test", "[quantum]") {
  Circuit id(1), plus(1), z(1);
  plus.h(0);
  z.z(0);
  CHECK_THAT(hadamard_test(id, Circuit(1), Part::real), WithinAbs(1.0, 1e-15));
  CHECK_THAT(hadamard_test(z, plus, Part::real), WithinAbs(0.0, 1e-15));

  std::mt19937_64 rng(17);
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  std::uniform_int_distribution<int> pick(0, 3);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 3;
    lcu::PauliWord w;
    for (int q = 0; q < n; ++q) w.push_back(letters[pick(rng)]);
    StateVector target = random_state(n, rng);
    Circuit prep = prepare_state_general(target.amplitudes);
    const Complex dense = target.amplitudes.dot(lcu::word_matrix(w) * target.amplitudes);
    const Complex ht = hadamard_test_complex(pauli_circuit(w, n), prep);
    CHECK(std::abs(ht - dense) < 1e-12);
    CHECK((apply_pauli(w, target.amplitudes) - lcu::word_matrix(w) * target.amplitudes).norm() < 1e-14);
  }
}

TEST_CASE("swap test", "[quantum]") {
  std::mt19937_64 rng(2);
  StateVector a = random_state(2, rng), b = random_state(2, rng);
  const double ov = std::norm(a.inner(b));
  CHECK_THAT(swap_test(prepare_state_general(a.amplitudes), prepare_state_general(b.amplitudes)), WithinAbs(ov, 1e-12));
}

TEST_CASE("shot sampling", "[quantum]") {
  CHECK(sample_expectation(1.0, ShotCount{100}, 1) == 1.0);
  CHECK(sample_expectation(-1.0, ShotCount{7}, 3) == -1.0);
  CHECK(sample_expectation(0.3, std::nullopt, 1) == 0.3);
  CHECK(sample_expectation(0.3, ShotCount{1000}, 42) == sample_expectation(0.3, ShotCount{1000}, 42));
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(std::abs(sample_expectation(0.0, ShotCount{1000000}, seed)) <= 0.005);

  const double exact = 0.37;
  const std::uint64_t shots = 500;
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) mean += sample_expectation(exact, ShotCount{shots}, seed);
  mean /= 1000;
  const double se = std::sqrt((1 - exact * exact) / shots / 1000.0);
  CHECK(std::abs(mean - exact) <= 4 * se);
}
