#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "bvq/errors.hpp"
#include "bvq/pauli_lcu.hpp"
#include "bvq/pde_model.hpp"
#include "bvq/quantum_kernel.hpp"
#include "bvq/vqls.hpp"

namespace bvq::design {

struct ObjectiveSpec {
  Vector phi_d;  // ones at T_{N k}, k = 1..M
  Vector phi_n;  // one at T0(l)
  pde::Weights weights;
  pde::Bounds bounds;
  double norm_ratio = 1.0;  // |phi_d| / |phi_n|
  double dt = 0.0;
  double horizon = 0.0;
  int n_x = 0;
  int n_t = 0;
};

/// Selectors sized to the (padded) state dimension.
inline ObjectiveSpec build_phi(const pde::HeatProblem& problem) {
  problem.validate();
  const int n = problem.n_x, m = problem.n_t;
  const Eigen::Index dim = next_power_of_two(static_cast<std::int64_t>(n) * m);
  ObjectiveSpec s;
  s.phi_d = Vector::Zero(dim);
  s.phi_n = Vector::Zero(dim);
  for (int k = 1; k <= m; ++k) s.phi_d(k * n - 1) = 1.0;
  s.phi_n(n - 1) = 1.0;
  s.weights = problem.weights;
  s.bounds = problem.bounds;
  s.norm_ratio = std::sqrt(static_cast<double>(m));
  s.dt = problem.dt;
  s.horizon = problem.horizon();
  s.n_x = n;
  s.n_t = m;
  return s;
}

/// (|phi_d|/|phi_n|) <phi_d^|psi> / <phi_n^|psi>; invariant to the scale and sign of psi.
inline double ratio_from_state(const CVector& psi, const ObjectiveSpec& spec) {
  if (psi.size() < spec.n_x * spec.n_t) throw InvalidDimension("state shorter than the space-time grid");
  const double nrm = psi.norm();
  if (!(nrm > 0.0)) throw DegenerateDenominator("zero state");
  const Eigen::Index len = std::min<Eigen::Index>(psi.size(), spec.phi_d.size());
  const Vector pd = spec.phi_d.head(len) / spec.phi_d.norm();
  const Vector pn = spec.phi_n.head(len) / spec.phi_n.norm();
  const Complex num = pd.cast<Complex>().dot(psi.head(len));
  const Complex den = pn.cast<Complex>().dot(psi.head(len));
  if (std::abs(den) / nrm < 1e-8) throw DegenerateDenominator("<phi_n|psi> vanishes; ratio undefined");
  return spec.norm_ratio * (num / den).real();
}

inline double ratio_from_state(const Vector& psi, const ObjectiveSpec& spec) {
  return ratio_from_state(CVector(psi.cast<Complex>()), spec);
}

inline double ratio_from_state(const quantum::StateVector& psi, const ObjectiveSpec& spec) {
  return ratio_from_state(psi.amplitudes, spec);
}

inline double design_cost(double ratio, const pde::DesignPoint& d, const ObjectiveSpec& spec) {
  const auto& w = spec.weights;
  const double dl = d.l / spec.bounds.l_min - 1.0;
  const double da = d.alpha / spec.bounds.alpha_max - 1.0;
  return w.w1 * (spec.dt / spec.horizon) * ratio + w.w2 * dl * dl + w.w3 * da * da;
}

inline double classical_ratio(const pde::HeatProblem& problem, const pde::DesignPoint& d,
                              pde::Scheme scheme = pde::Scheme::implicit_euler) {
  const Vector u = pde::classical_solve(pde::assemble(problem, d, scheme));
  return ratio_from_state(u, build_phi(problem));
}

inline double design_cost_classical(const pde::DesignPoint& d, const pde::HeatProblem& problem,
                                    pde::Scheme scheme = pde::Scheme::implicit_euler) {
  return design_cost(classical_ratio(problem, d, scheme), d, build_phi(problem));
}

/// Standard error attached to a quantum evaluation: c * sqrt(C_g * log2 N).
inline double noise_stderr(double cg, int n_x, double c = 0.1) {
  return c * std::sqrt(std::max(cg, 0.0) * std::log2(static_cast<double>(n_x)));
}

/// Ratio from SWAP-test overlaps |<phi|psi>|^2; only valid when both overlaps are
/// known to be non-negative (positive temperatures), since the sign is lost.
inline double ratio_swap_test(const quantum::Circuit& psi_prep, const ObjectiveSpec& spec) {
  const double pd = quantum::swap_test(quantum::prepare_state_general(spec.phi_d), psi_prep);
  const double pn = quantum::swap_test(quantum::prepare_state_general(spec.phi_n), psi_prep);
  if (pn < 1e-16) throw DegenerateDenominator("<phi_n|psi> vanishes; ratio undefined");
  return spec.norm_ratio * std::sqrt(std::max(pd, 0.0) / pn);
}

struct Evaluation {
  pde::DesignPoint design;
  double ratio = 0.0;
  double cost = 0.0;
  double std_error = 0.0;
  double vqls_final_cost = 0.0;
  std::string source;  // classical | quantum
  bool ok = true;
  std::string error;
  std::optional<vqls::VqlsResult> vqls;
};

/// Inner-loop evaluation of one design: LCU recombination, VQLS, ratio, cost.
class DesignEvaluator {
 public:
  DesignEvaluator(pde::HeatProblem problem, vqls::VqlsConfig cfg, pde::Scheme scheme = pde::Scheme::implicit_euler,
                  double noise_c = 0.1)
      : problem_(std::move(problem)),
        cfg_(cfg),
        scheme_(scheme),
        noise_c_(noise_c),
        spec_(build_phi(problem_)),
        cache_(lcu::build_separable(problem_, scheme_)) {}

  const ObjectiveSpec& spec() const { return spec_; }
  const pde::HeatProblem& problem() const { return problem_; }

  /// Replace the VQLS state by the normalized classical solution.
  void set_oracle_injection(bool on) { oracle_ = on; }

  Evaluation evaluate(const pde::DesignPoint& d, std::uint64_t seed) const {
    Evaluation e;
    e.design = d;
    e.source = oracle_ ? "classical" : "quantum";
    try {
      if (oracle_) {
        e.ratio = classical_ratio(problem_, d, scheme_);
        e.vqls_final_cost = 0.0;
      } else {
        const lcu::LcuDecomposition a = lcu::recombine(cache_, d);
        Vector b = lcu::pad_vector(pde::build_rhs(problem_, d));
        const quantum::Circuit bc = quantum::prepare_b(b, problem_.n_x, problem_.n_t);
        vqls::VqlsConfig cfg = cfg_;
        cfg.seed = seed;
        auto r = vqls::solve(a, bc, cfg);
        e.ratio = ratio_from_state(r.solution_state, spec_);
        e.vqls_final_cost = r.final_cost;
        e.std_error = noise_stderr(r.final_cost, problem_.n_x, noise_c_);
        e.vqls = std::move(r);
      }
      e.cost = design_cost(e.ratio, d, spec_);
      if (!std::isfinite(e.cost)) throw NumericalError("non-finite design cost");
    } catch (const Error& err) {
      e.ok = false;
      e.error = err.what();
    }
    return e;
  }

 private:
  pde::HeatProblem problem_;
  vqls::VqlsConfig cfg_;
  pde::Scheme scheme_;
  double noise_c_;
  ObjectiveSpec spec_;
  lcu::SeparableLcu cache_;
  bool oracle_ = false;
};

}  // namespace bvq::design
