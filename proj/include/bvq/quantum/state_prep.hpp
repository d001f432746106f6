#pragma once

#include <cmath>
#include <vector>

#include "bvq/pde_model.hpp"
#include "bvq/quantum/circuit.hpp"

namespace bvq::quantum {

namespace detail {

struct TreeOptions {
  bool real = true;                 // signed RY only, no RZ or phase
  bool fresh_as_h = true;           // RY(pi/2) on an untouched qubit becomes H
  std::vector<Control> extra;       // controls applied to every emitted gate
};

inline bool same_angle(double a, double b) { return std::abs(a - b) <= 1e-13; }

/// Emits a uniformly controlled rotation: one gate per prefix pattern, merged
/// into a single gate when every reachable pattern shares the angle.
inline void emit_multiplexed(Circuit& c, GateKind kind, const std::vector<int>& qubits, int level,
                             const std::vector<double>& angles, const std::vector<double>& weights,
                             const TreeOptions& opt) {
  const double tol = 1e-14;
  double common = 0.0;
  bool have = false, uniform = true;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (weights[k] <= tol) continue;
    if (!have) {
      common = angles[k];
      have = true;
    } else if (!same_angle(common, angles[k])) {
      uniform = false;
      break;
    }
  }
  if (!have) return;
  const int target = qubits[level];
  if (uniform) {
    if (same_angle(common, 0.0)) return;
    if (kind == GateKind::RY && opt.fresh_as_h && opt.extra.empty() && same_angle(common, kPi / 2)) {
      c.add({GateKind::H, target});
      return;
    }
    Gate g{kind, target, -1, common, opt.extra};
    c.add(std::move(g));
    return;
  }
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (weights[k] <= tol || same_angle(angles[k], 0.0)) continue;
    Gate g{kind, target, -1, angles[k], opt.extra};
    for (int p = 0; p < level; ++p) g.controls.push_back({qubits[p], static_cast<int>((k >> (level - 1 - p)) & 1u)});
    c.add(std::move(g));
  }
}

/// Rotation tree preparing v/|v| on `qubits` (most significant first), starting from |0...0>.
inline void rotation_tree(Circuit& c, const CVector& v, const std::vector<int>& qubits, const TreeOptions& opt) {
  const int m = static_cast<int>(qubits.size());
  if (v.size() != (Eigen::Index{1} << m)) throw InvalidDimension("tree vector length must be 2^qubits");
  std::vector<std::vector<double>> ry(m), rz(m), w(m);
  CVector node = v;
  for (int level = m; level >= 1; --level) {
    const Eigen::Index half = Eigen::Index{1} << (level - 1);
    CVector parent(half);
    auto& ay = ry[level - 1];
    auto& az = rz[level - 1];
    auto& wt = w[level - 1];
    ay.resize(half);
    az.resize(half);
    wt.resize(half);
    for (Eigen::Index k = 0; k < half; ++k) {
      const Complex a0 = node(2 * k), a1 = node(2 * k + 1);
      if (opt.real) {
        const double x0 = a0.real(), x1 = a1.real();
        ay[k] = 2.0 * std::atan2(x1, x0);
        az[k] = 0.0;
        parent(k) = std::hypot(x0, x1);
      } else {
        const double r0 = std::abs(a0), r1 = std::abs(a1);
        double p0 = std::arg(a0), p1 = std::arg(a1);
        if (r1 <= 1e-15) p1 = p0;
        if (r0 <= 1e-15) p0 = p1;
        ay[k] = 2.0 * std::atan2(r1, r0);
        az[k] = p1 - p0;
        parent(k) = std::polar(std::hypot(r0, r1), 0.5 * (p0 + p1));
      }
      wt[k] = std::abs(parent(k));
    }
    node = std::move(parent);
  }
  if (!opt.real) {
    const double chi = std::arg(node(0));
    if (std::abs(chi) > 1e-15) {
      Gate g{GateKind::Phase, -1, -1, chi, opt.extra};
      c.add(std::move(g));
    }
  }
  for (int level = 0; level < m; ++level) {
    emit_multiplexed(c, GateKind::RY, qubits, level, ry[level], w[level], opt);
    if (!opt.real) {
      TreeOptions o = opt;
      o.fresh_as_h = false;
      emit_multiplexed(c, GateKind::RZ, qubits, level, rz[level], w[level], o);
    }
  }
}

inline std::vector<int> range(int from, int count) {
  std::vector<int> q(count);
  for (int i = 0; i < count; ++i) q[i] = from + i;
  return q;
}

}  // namespace detail

/// Multiplexed RY/RZ cascade preparing target/|target| from |0...0> (real targets need RY only).
template <typename Derived>
Circuit prepare_state_general(const Eigen::MatrixBase<Derived>& target) {
  if (!is_power_of_two(target.size())) throw PaddingRequired("target length must be a power of two");
  CVector v = target.template cast<Complex>();
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw InvalidArgument("cannot prepare the zero vector");
  v /= nrm;
  const int n = log2_exact(v.size());
  detail::TreeOptions opt;
  opt.real = v.imag().cwiseAbs().maxCoeff() == 0.0;
  Circuit c(n);
  detail::rotation_tree(c, v, detail::range(0, n), opt);
  return c;
}

/// Circuit for b = (T0, f q^1 e1, ..., f q^{M-1} e1). Time qubits are the most
/// significant, the space register is prepared only in the t = 0 branch.
inline Circuit prepare_b_handcrafted(const Vector& b, int n_x, int n_t) {
  if (!is_power_of_two(n_x) || !is_power_of_two(n_t)) throw StructureMismatch("n_x and n_t must be powers of two");
  if (b.size() != static_cast<Eigen::Index>(n_x) * n_t) throw InvalidDimension("rhs length must be n_x * n_t");
  const double nrm = b.norm();
  if (!(nrm > 0.0)) throw InvalidArgument("cannot prepare the zero vector");
  const double tol = 1e-14 * nrm;
  for (int k = 1; k < n_t; ++k)
    for (int i = 1; i < n_x; ++i)
      if (std::abs(b(k * n_x + i)) > tol) throw StructureMismatch("later time blocks must be supported on the first grid node");

  const int mt = log2_exact(n_t), ns = log2_exact(n_x);
  Circuit c(mt + ns);

  Vector t(n_t);
  const Vector t0 = b.head(n_x);
  t(0) = t0.norm();
  for (int k = 1; k < n_t; ++k) t(k) = b(k * n_x);

  detail::TreeOptions topt;
  detail::rotation_tree(c, t.cast<Complex>(), detail::range(0, mt), topt);

  if (t(0) > tol && ns > 0) {
    detail::TreeOptions sopt;
    const bool time_deterministic = (t.tail(n_t - 1).cwiseAbs().maxCoeff() <= tol);
    if (!time_deterministic)
      for (int q = 0; q < mt; ++q) sopt.extra.push_back({q, 0});
    detail::rotation_tree(c, (t0 / t(0)).cast<Complex>(), detail::range(mt, ns), sopt);
  }
  return c;
}

inline Circuit prepare_b_handcrafted(const pde::HeatProblem& problem, const pde::DesignPoint& d) {
  return prepare_b_handcrafted(pde::build_rhs(problem, d), problem.n_x, problem.n_t);
}

/// Hand-crafted circuit when the structure allows it, general cascade otherwise.
inline Circuit prepare_b(const Vector& b, int n_x, int n_t) {
  try {
    if (b.size() == static_cast<Eigen::Index>(n_x) * n_t) return prepare_b_handcrafted(b, n_x, n_t);
  } catch (const StructureMismatch&) {
    // fall through to the general cascade
  }
  Vector padded = Vector::Zero(next_power_of_two(b.size()));
  padded.head(b.size()) = b;
  return prepare_state_general(padded);
}

}  // namespace bvq::quantum
