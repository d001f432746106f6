#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bvq/errors.hpp"
#include "bvq/quantum/statevector.hpp"

namespace bvq::quantum {

enum class GateKind { H, X, Y, Z, S, Sdg, RY, RZ, SWAP, Phase };

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::SWAP: return "SWAP";
    case GateKind::Phase: return "PHASE";
  }
  return "?";
}

struct Control {
  int qubit = 0;
  int value = 1;
};

/// One gate application. Phase multiplies the controlled subspace by e^{i angle}
/// and has no target.
struct Gate {
  GateKind kind = GateKind::H;
  int target = -1;
  int target2 = -1;
  double angle = 0.0;
  std::vector<Control> controls;

  bool parametric() const { return kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::Phase; }

  Gate inverse() const {
    Gate g = *this;
    switch (kind) {
      case GateKind::S: g.kind = GateKind::Sdg; break;
      case GateKind::Sdg: g.kind = GateKind::S; break;
      case GateKind::RY:
      case GateKind::RZ:
      case GateKind::Phase: g.angle = -angle; break;
      default: break;
    }
    return g;
  }
};

using Mat2 = std::array<Complex, 4>;  // row-major

inline Mat2 gate_matrix(const Gate& g) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i1{0, 1};
  switch (g.kind) {
    case GateKind::H: return {r, r, r, -r};
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y: return {0.0, -i1, i1, 0.0};
    case GateKind::Z: return {1.0, 0.0, 0.0, -1.0};
    case GateKind::S: return {1.0, 0.0, 0.0, i1};
    case GateKind::Sdg: return {1.0, 0.0, 0.0, -i1};
    case GateKind::RY: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      return {c, -s, s, c};
    }
    case GateKind::RZ: return {std::exp(-i1 * (g.angle / 2)), 0.0, 0.0, std::exp(i1 * (g.angle / 2))};
    default: throw InvalidArgument("gate has no single-qubit matrix");
  }
}

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n) : n_qubits(n) {}

  Circuit& add(Gate g) {
    gates.push_back(std::move(g));
    return *this;
  }
  Circuit& h(int q) { return add({GateKind::H, q}); }
  Circuit& x(int q) { return add({GateKind::X, q}); }
  Circuit& y(int q) { return add({GateKind::Y, q}); }
  Circuit& z(int q) { return add({GateKind::Z, q}); }
  Circuit& s(int q) { return add({GateKind::S, q}); }
  Circuit& sdg(int q) { return add({GateKind::Sdg, q}); }
  Circuit& ry(int q, double a) { return add({GateKind::RY, q, -1, a}); }
  Circuit& rz(int q, double a) { return add({GateKind::RZ, q, -1, a}); }
  Circuit& swap(int a, int b) { return add({GateKind::SWAP, a, b}); }
  Circuit& phase(double a) { return add({GateKind::Phase, -1, -1, a}); }

  Circuit& append(const Circuit& other) {
    if (other.n_qubits > n_qubits) throw InvalidDimension("appended circuit is wider");
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
    return *this;
  }

  Circuit inverse() const {
    Circuit c(n_qubits);
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) c.gates.push_back(it->inverse());
    return c;
  }

  /// Every gate gains an extra control; global phases become controlled phases.
  Circuit controlled(int control, int value = 1) const {
    Circuit c(n_qubits);
    for (Gate g : gates) {
      g.controls.push_back({control, value});
      c.gates.push_back(std::move(g));
    }
    return c;
  }

  /// Relabels qubit q as q + offset on a register of width n.
  Circuit shifted(int offset, int width) const {
    Circuit c(width);
    for (Gate g : gates) {
      if (g.target >= 0) g.target += offset;
      if (g.target2 >= 0) g.target2 += offset;
      for (auto& ctl : g.controls) ctl.qubit += offset;
      c.gates.push_back(std::move(g));
    }
    return c;
  }

  std::size_t size() const { return gates.size(); }

  /// One gate per line: NAME [c<q>=<v> ...] q<t> [q<t2>] [angle]
  std::string to_text() const {
    std::ostringstream os;
    os << std::setprecision(10);
    for (const auto& g : gates) {
      os << gate_name(g.kind);
      for (const auto& c : g.controls) os << " c" << c.qubit << '=' << c.value;
      if (g.target >= 0) os << " q" << g.target;
      if (g.target2 >= 0) os << " q" << g.target2;
      if (g.parametric()) os << ' ' << g.angle;
      os << '\n';
    }
    return os.str();
  }
};

namespace detail {

inline void check_qubit(int q, int n) {
  if (q < 0 || q >= n) throw IndexOutOfRange("qubit index " + std::to_string(q) + " out of range for " + std::to_string(n) + " qubits");
}

inline void control_masks(const Gate& g, int n, std::uint64_t& mask, std::uint64_t& value) {
  mask = 0;
  value = 0;
  for (const auto& c : g.controls) {
    check_qubit(c.qubit, n);
    const std::uint64_t m = qubit_mask(c.qubit, n);
    mask |= m;
    if (c.value) value |= m;
  }
}

}  // namespace detail

inline void apply_gate(const Gate& g, CVector& amp, int n) {
  std::uint64_t cmask, cval;
  detail::control_masks(g, n, cmask, cval);
  const std::uint64_t dim = std::uint64_t{1} << n;
  if (g.kind == GateKind::Phase) {
    const Complex ph = std::exp(Complex(0, g.angle));
    for (std::uint64_t i = 0; i < dim; ++i)
      if ((i & cmask) == cval) amp(i) *= ph;
    return;
  }
  detail::check_qubit(g.target, n);
  if (g.kind == GateKind::SWAP) {
    detail::check_qubit(g.target2, n);
    if (g.target2 == g.target) return;
    const std::uint64_t ma = qubit_mask(g.target, n), mb = qubit_mask(g.target2, n);
    for (std::uint64_t i = 0; i < dim; ++i) {
      if ((i & cmask) != cval) continue;
      if ((i & ma) && !(i & mb)) std::swap(amp(i), amp((i & ~ma) | mb));
    }
    return;
  }
  const std::uint64_t mt = qubit_mask(g.target, n);
  if (cmask & mt) throw InvalidArgument("gate target is also a control");
  const Mat2 u = gate_matrix(g);
  for (std::uint64_t i = 0; i < dim; ++i) {
    if ((i & mt) || (i & cmask) != cval) continue;
    const std::uint64_t j = i | mt;
    const Complex a0 = amp(i), a1 = amp(j);
    amp(i) = u[0] * a0 + u[1] * a1;
    amp(j) = u[2] * a0 + u[3] * a1;
  }
}

inline void run_in_place(const Circuit& c, StateVector& psi) {
  if (c.n_qubits > psi.n_qubits) throw InvalidDimension("circuit wider than state");
  for (const auto& g : c.gates) apply_gate(g, psi.amplitudes, psi.n_qubits);
}

inline StateVector run_circuit(const Circuit& c, const StateVector& input) {
  StateVector out = input;
  run_in_place(c, out);
  return out;
}

inline StateVector run_circuit(const Circuit& c) { return run_circuit(c, StateVector::zero(c.n_qubits)); }

/// Dense unitary of the circuit, column j = C|j>.
inline CMatrix circuit_unitary(const Circuit& c) {
  const Eigen::Index dim = Eigen::Index{1} << c.n_qubits;
  CMatrix u(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) u.col(j) = run_circuit(c, StateVector::basis(c.n_qubits, j)).amplitudes;
  return u;
}

}  // namespace bvq::quantum
