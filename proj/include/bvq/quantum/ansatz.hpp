#pragma once

#include "bvq/quantum/circuit.hpp"

namespace bvq::quantum {

/// Variational angles, laid out as theta[layer * n + qubit].
using AnsatzParams = Vector;

/// Per layer: H on every qubit, nearest-neighbour SWAP ladder, RY(theta) column.
/// All gates are real, so the output amplitudes are real.
inline Circuit ansatz(const AnsatzParams& theta, int n_qubits, int layers) {
  if (n_qubits < 1 || layers < 1) throw InvalidDimension("ansatz needs n_qubits >= 1 and layers >= 1");
  if (theta.size() != static_cast<Eigen::Index>(n_qubits) * layers)
    throw InvalidDimension("theta length must equal layers * n_qubits");
  Circuit c(n_qubits);
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n_qubits; ++q) c.h(q);
    for (int q = 0; q + 1 < n_qubits; ++q) c.swap(q, q + 1);
    for (int q = 0; q < n_qubits; ++q) {
      if (!std::isfinite(theta(l * n_qubits + q))) throw InvalidArgument("non-finite ansatz angle");
      c.ry(q, theta(l * n_qubits + q));
    }
  }
  return c;
}

inline StateVector ansatz_state(const AnsatzParams& theta, int n_qubits, int layers) {
  return run_circuit(ansatz(theta, n_qubits, layers));
}

/// Parameter-shift derivative of f(theta) for gates of the form exp(-i theta P / 2).
template <typename F>
Vector parameter_shift(F&& f, const Vector& theta, double shift = kPi / 2) {
  Vector g(theta.size());
  Vector t = theta;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    t(j) = theta(j) + shift;
    const double fp = f(t);
    t(j) = theta(j) - shift;
    const double fm = f(t);
    t(j) = theta(j);
    g(j) = (fp - fm) / (2.0 * std::sin(shift));
  }
  return g;
}

}  // namespace bvq::quantum
