#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "bvq/errors.hpp"
#include "bvq/pauli_lcu.hpp"
#include "bvq/quantum_kernel.hpp"

namespace bvq::vqls {

using quantum::Circuit;
using quantum::ShotCount;
using quantum::StateVector;

enum class CostVariant { ug, g, ul, l };
enum class OptimizerKind { adagrad, cobyla };
enum class EvaluatorKind { statevector, hadamard };

inline CostVariant cost_variant_from_string(const std::string& s) {
  if (s == "ug") return CostVariant::ug;
  if (s == "g") return CostVariant::g;
  if (s == "ul") return CostVariant::ul;
  if (s == "l") return CostVariant::l;
  throw InvalidArgument("unknown cost variant '" + s + "'");
}

inline const char* to_string(CostVariant v) {
  switch (v) {
    case CostVariant::ug: return "ug";
    case CostVariant::g: return "g";
    case CostVariant::ul: return "ul";
    case CostVariant::l: return "l";
  }
  return "?";
}

inline OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "adagrad") return OptimizerKind::adagrad;
  if (s == "cobyla" || s == "cobyla-like") return OptimizerKind::cobyla;
  throw InvalidArgument("unknown optimizer '" + s + "'");
}

inline bool is_local(CostVariant v) { return v == CostVariant::ul || v == CostVariant::l; }

struct VqlsConfig {
  CostVariant cost_variant = CostVariant::g;
  double gamma = 1e-4;
  ShotCount shots;  // nullopt = exact
  int max_iters = 150;
  OptimizerKind optimizer = OptimizerKind::adagrad;
  double adagrad_step = 0.8;
  double adagrad_eps = 1e-8;
  double init_a = 0.5;
  double init_b = 0.5;
  int layers = 1;
  std::uint64_t seed = 0;
  EvaluatorKind evaluator = EvaluatorKind::statevector;
  double trust_radius_start = 0.5;
  double trust_radius_end = 1e-4;

  void validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0, 1]");
    if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
    if (layers < 1) throw InvalidArgument("layers must be >= 1");
    if (!(init_a > 0.0 && init_b > 0.0)) throw InvalidArgument("Beta shape parameters must be positive");
    if (!(adagrad_step > 0.0)) throw InvalidArgument("adagrad step must be positive");
  }
};

struct VqlsResult {
  Vector theta_star;
  double final_cost = 0.0;
  std::vector<double> cost_history;
  int iterations_used = 0;
  StateVector solution_state;
  bool converged = false;
  std::vector<std::string> warnings;

  std::vector<double> best_so_far() const {
    std::vector<double> out(cost_history.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cost_history.size(); ++i) out[i] = best = std::min(best, cost_history[i]);
    return out;
  }
};

/// Symbolic products A_j A_i = phase * word for i <= j (Pauli words are Hermitian).
struct PairTable {
  struct Entry {
    int i, j;
    Complex phase;
    lcu::PauliWord word;
  };
  std::vector<Entry> entries;

  explicit PairTable(const lcu::LcuDecomposition& a) {
    const int nl = static_cast<int>(a.size());
    entries.reserve(static_cast<std::size_t>(nl) * (nl + 1) / 2);
    for (int i = 0; i < nl; ++i)
      for (int j = i; j < nl; ++j) {
        auto [ph, w] = lcu::multiply(a.terms[j].word, a.terms[i].word);
        entries.push_back({i, j, ph, std::move(w)});
      }
  }
};

/// Source of the expectation values the costs are assembled from.
class TermEvaluator {
 public:
  virtual ~TermEvaluator() = default;
  /// Sets the ansatz circuit V; the state is V|0>.
  virtual void prepare(const Circuit& v) = 0;
  /// <psi| W |psi>
  virtual Complex pauli_expectation(const lcu::PauliWord& w) = 0;
  /// <b| W |psi>
  virtual Complex b_overlap(const lcu::PauliWord& w) = 0;
  /// |<b| W |psi>|^2
  virtual double b_overlap_sq(const lcu::PauliWord& w) = 0;
  /// <psi| Wj U_b Z_k U_b^dag Wi |psi>
  virtual Complex local_term(const lcu::PauliWord& wi, const lcu::PauliWord& wj, int k) = 0;
};

namespace detail {

inline CVector z_on(int k, int n, const CVector& v) {
  CVector out = v;
  const std::uint64_t m = quantum::qubit_mask(k, n);
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(v.size()); ++i)
    if (i & m) out(i) = -out(i);
  return out;
}

template <typename Rng>
Complex sampled(Complex exact, const ShotCount& shots, Rng& rng) {
  if (!shots) return exact;
  return {quantum::sample_expectation(std::clamp(exact.real(), -1.0, 1.0), shots, rng),
          quantum::sample_expectation(std::clamp(exact.imag(), -1.0, 1.0), shots, rng)};
}

}  // namespace detail

/// Expectations read directly off the simulated statevector.
class StatevectorEvaluator : public TermEvaluator {
 public:
  StatevectorEvaluator(const Circuit& b_circuit, ShotCount shots = std::nullopt, std::uint64_t seed = 0)
      : n_(b_circuit.n_qubits), shots_(shots), rng_(seed) {
    ub_ = quantum::circuit_unitary(b_circuit);
    b_ = ub_.col(0);
  }

  void prepare(const Circuit& v) override {
    psi_ = quantum::run_circuit(v, StateVector::zero(n_)).amplitudes;
    cache_.clear();
  }

  Complex pauli_expectation(const lcu::PauliWord& w) override {
    if (is_identity(w)) return 1.0;
    return detail::sampled(psi_.dot(quantum::apply_pauli(w, psi_)), shots_, rng_);
  }

  Complex b_overlap(const lcu::PauliWord& w) override {
    return detail::sampled(b_.dot(applied(w)), shots_, rng_);
  }

  double b_overlap_sq(const lcu::PauliWord& w) override {
    const double p = std::norm(b_.dot(applied(w)));
    if (!shots_) return p;
    return 0.5 * (quantum::sample_expectation(2.0 * p - 1.0, shots_, rng_) + 1.0);
  }

  Complex local_term(const lcu::PauliWord& wi, const lcu::PauliWord& wj, int k) override {
    const CVector& ci = rotated(wi);
    const CVector& cj = rotated(wj);
    return detail::sampled(cj.dot(detail::z_on(k, n_, ci)), shots_, rng_);
  }

 private:
  static bool is_identity(const lcu::PauliWord& w) { return w.find_first_not_of('I') == std::string::npos; }

  const CVector& applied(const lcu::PauliWord& w) {
    auto it = cache_.find(w);
    if (it == cache_.end()) it = cache_.emplace(w, Cached{quantum::apply_pauli(w, psi_), CVector()}).first;
    return it->second.a_psi;
  }

  // U_b^dag W |psi>
  const CVector& rotated(const lcu::PauliWord& w) {
    applied(w);
    auto& c = cache_.at(w);
    if (c.rotated.size() == 0) c.rotated = ub_.adjoint() * c.a_psi;
    return c.rotated;
  }

  struct Cached {
    CVector a_psi;
    CVector rotated;
  };

  int n_;
  ShotCount shots_;
  std::mt19937_64 rng_;
  CMatrix ub_;
  CVector b_;
  CVector psi_;
  std::unordered_map<lcu::PauliWord, Cached> cache_;
};

/// Every expectation estimated by simulating an ancilla Hadamard-test circuit.
class HadamardTestEvaluator : public TermEvaluator {
 public:
  HadamardTestEvaluator(const Circuit& b_circuit, ShotCount shots = std::nullopt, std::uint64_t seed = 0)
      : n_(b_circuit.n_qubits), ub_(b_circuit), ub_dag_(b_circuit.inverse()), shots_(shots), rng_(seed) {}

  void prepare(const Circuit& v) override {
    v_ = v;
    expect_.clear();
  }

  Complex pauli_expectation(const lcu::PauliWord& w) override {
    if (w.find_first_not_of('I') == std::string::npos) return 1.0;
    auto it = expect_.find(w);
    if (it != expect_.end()) return it->second;
    const Complex e = test(quantum::pauli_circuit(w, n_), v_);
    expect_.emplace(w, e);
    return e;
  }

  Complex b_overlap(const lcu::PauliWord& w) override {
    Circuit u(n_);
    u.append(v_).append(quantum::pauli_circuit(w, n_)).append(ub_dag_);
    return test(u, Circuit(n_));
  }

  double b_overlap_sq(const lcu::PauliWord& w) override {
    Circuit u(n_);
    u.append(v_).append(quantum::pauli_circuit(w, n_)).append(ub_dag_);
    const double p = quantum::zero_probability(u);
    if (!shots_) return p;
    return 0.5 * (quantum::sample_expectation(2.0 * p - 1.0, shots_, rng_) + 1.0);
  }

  Complex local_term(const lcu::PauliWord& wi, const lcu::PauliWord& wj, int k) override {
    Circuit u(n_);
    u.append(quantum::pauli_circuit(wi, n_)).append(ub_dag_);
    u.z(k);
    u.append(ub_).append(quantum::pauli_circuit(wj, n_));
    return test(u, v_);
  }

 private:
  Complex test(const Circuit& u, const Circuit& prep) {
    const double re = quantum::hadamard_test(u, prep, quantum::Part::real);
    const double im = quantum::hadamard_test(u, prep, quantum::Part::imag);
    return {quantum::sample_expectation(re, shots_, rng_), quantum::sample_expectation(im, shots_, rng_)};
  }

  int n_;
  Circuit ub_, ub_dag_, v_;
  ShotCount shots_;
  std::mt19937_64 rng_;
  std::unordered_map<lcu::PauliWord, Complex> expect_;
};

inline std::unique_ptr<TermEvaluator> make_evaluator(EvaluatorKind kind, const Circuit& b_circuit, ShotCount shots,
                                                     std::uint64_t seed) {
  if (kind == EvaluatorKind::hadamard) return std::make_unique<HadamardTestEvaluator>(b_circuit, shots, seed);
  return std::make_unique<StatevectorEvaluator>(b_circuit, shots, seed);
}

/// beta_ij = <psi| A_j^dag A_i |psi> for a prepared evaluator.
inline Complex beta_term(int i, int j, const lcu::LcuDecomposition& a, TermEvaluator& ev) {
  if (i < 0 || j < 0 || i >= static_cast<int>(a.size()) || j >= static_cast<int>(a.size()))
    throw IndexOutOfRange("term index out of range");
  auto [ph, w] = lcu::multiply(a.terms[j].word, a.terms[i].word);
  return ph * ev.pauli_expectation(w);
}

/// gamma_ij = <b|A_i psi> conj(<b|A_j psi>); the diagonal uses the all-zeros probability.
inline Complex gamma_term(int i, int j, const lcu::LcuDecomposition& a, TermEvaluator& ev) {
  if (i < 0 || j < 0 || i >= static_cast<int>(a.size()) || j >= static_cast<int>(a.size()))
    throw IndexOutOfRange("term index out of range");
  if (i == j) return ev.b_overlap_sq(a.terms[i].word);
  return ev.b_overlap(a.terms[i].word) * std::conj(ev.b_overlap(a.terms[j].word));
}

/// Expectation-level pieces every cost variant is built from.
struct CostTerms {
  double phi = 0.0;  // <psi|A^dag A|psi>
  double g = 0.0;    // |<b|A|psi>|^2
  Vector d;          // <psi|A^dag U_b Z_k U_b^dag A|psi>, k = 0..n-1

  CostTerms operator+(const CostTerms& o) const { return {phi + o.phi, g + o.g, d + o.d}; }
  CostTerms operator-(const CostTerms& o) const { return {phi - o.phi, g - o.g, d - o.d}; }
  CostTerms operator*(double s) const { return {phi * s, g * s, d * s}; }
};

/// Sums the pairwise terms, computing only i <= j and using conjugate symmetry.
inline CostTerms assemble_terms(const lcu::LcuDecomposition& a, const PairTable& pairs, TermEvaluator& ev, bool local) {
  const int nl = static_cast<int>(a.size());
  const int n = a.n_qubits;
  CostTerms t;
  t.d = Vector::Zero(local ? n : 0);

  std::vector<Complex> overlaps(nl);
  for (int i = 0; i < nl; ++i) overlaps[i] = ev.b_overlap(a.terms[i].word);

  for (const auto& e : pairs.entries) {
    const Complex ai = a.terms[e.i].coeff, aj = a.terms[e.j].coeff;
    const Complex w = ai * std::conj(aj);
    const double mult = (e.i == e.j) ? 1.0 : 2.0;
    const Complex beta = e.phase * ev.pauli_expectation(e.word);
    t.phi += mult * (w * beta).real();
    const Complex gamma = (e.i == e.j) ? Complex(ev.b_overlap_sq(a.terms[e.i].word)) : overlaps[e.i] * std::conj(overlaps[e.j]);
    t.g += mult * (w * gamma).real();
    if (local)
      for (int k = 0; k < n; ++k) t.d(k) += mult * (w * ev.local_term(a.terms[e.i].word, a.terms[e.j].word, k)).real();
  }
  return t;
}

inline double cost_from_terms(const CostTerms& t, CostVariant v, int n) {
  if (t.phi <= 1e-14) throw DegenerateOperator("A maps the ansatz state to (numerically) zero");
  double c = 0.0;
  switch (v) {
    case CostVariant::ug: c = t.phi - t.g; break;
    case CostVariant::g: c = 1.0 - t.g / t.phi; break;
    case CostVariant::ul: c = 0.5 * t.phi - t.d.sum() / (2.0 * n); break;
    case CostVariant::l: c = (0.5 * t.phi - t.d.sum() / (2.0 * n)) / t.phi; break;
  }
  return std::max(c, 0.0);
}

inline double dcost_from_terms(const CostTerms& t, const CostTerms& dt, CostVariant v, int n) {
  switch (v) {
    case CostVariant::ug: return dt.phi - dt.g;
    case CostVariant::g: return -(dt.g * t.phi - t.g * dt.phi) / (t.phi * t.phi);
    case CostVariant::ul: return 0.5 * dt.phi - dt.d.sum() / (2.0 * n);
    case CostVariant::l: {
      const double cu = 0.5 * t.phi - t.d.sum() / (2.0 * n);
      const double dcu = 0.5 * dt.phi - dt.d.sum() / (2.0 * n);
      return (dcu * t.phi - cu * dt.phi) / (t.phi * t.phi);
    }
  }
  return 0.0;
}

/// A system prepared for repeated cost evaluation: LCU, rhs circuit and pair table.
class CostFunction {
 public:
  CostFunction(lcu::LcuDecomposition a, const Circuit& b_circuit, int layers, EvaluatorKind kind = EvaluatorKind::statevector,
               ShotCount shots = std::nullopt, std::uint64_t seed = 0)
      : a_(std::move(a)), pairs_(a_), layers_(layers), n_(a_.n_qubits), shots_(shots) {
    if (b_circuit.n_qubits != n_) throw InvalidDimension("rhs circuit width must match the LCU qubit count");
    if (a_.size() == 0) throw DegenerateOperator("empty LCU");
    ev_ = make_evaluator(kind, b_circuit, shots, seed);
  }

  int n_qubits() const { return n_; }
  int layers() const { return layers_; }
  int n_params() const { return n_ * layers_; }
  const lcu::LcuDecomposition& lcu() const { return a_; }
  bool exact() const { return !shots_.has_value(); }
  TermEvaluator& evaluator() { return *ev_; }

  CostTerms terms(const Vector& theta, bool local) {
    ev_->prepare(quantum::ansatz(theta, n_, layers_));
    return assemble_terms(a_, pairs_, *ev_, local);
  }

  double operator()(const Vector& theta, CostVariant v) { return cost_from_terms(terms(theta, is_local(v)), v, n_); }

  /// All four variants from one term evaluation.
  struct AllCosts {
    double ug, g, ul, l;
  };
  AllCosts all(const Vector& theta) {
    CostTerms t = terms(theta, true);
    return {cost_from_terms(t, CostVariant::ug, n_), cost_from_terms(t, CostVariant::g, n_),
            cost_from_terms(t, CostVariant::ul, n_), cost_from_terms(t, CostVariant::l, n_)};
  }

  /// Parameter-shift gradient: shifts of +-pi/2 on each RY angle applied to the
  /// expectation terms, then the chain rule of the chosen variant.
  Vector gradient(const Vector& theta, CostVariant v) {
    const bool local = is_local(v);
    const CostTerms t0 = terms(theta, local);
    if (t0.phi <= 1e-14) throw DegenerateOperator("A maps the ansatz state to (numerically) zero");
    Vector g(theta.size());
    Vector th = theta;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      th(j) = theta(j) + kPi / 2;
      const CostTerms tp = terms(th, local);
      th(j) = theta(j) - kPi / 2;
      const CostTerms tm = terms(th, local);
      th(j) = theta(j);
      g(j) = dcost_from_terms(t0, (tp - tm) * 0.5, v, n_);
    }
    return g;
  }

 private:
  lcu::LcuDecomposition a_;
  PairTable pairs_;
  int layers_;
  int n_;
  ShotCount shots_;
  std::unique_ptr<TermEvaluator> ev_;
};

/// Beta(a, b) sample scaled to [0, 2 pi), one per angle.
template <typename Rng>
Vector beta_init(int count, double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  Vector t(count);
  for (int i = 0; i < count; ++i) {
    double x = 0.0, y = 0.0;
    do {
      x = ga(rng);
      y = gb(rng);
    } while (x + y <= 0.0);
    t(i) = 2.0 * kPi * std::min(x / (x + y), std::nextafter(1.0, 0.0));
  }
  return t;
}

namespace detail {

struct Tracker {
  VqlsResult& r;
  double gamma;
  double best = std::numeric_limits<double>::infinity();

  /// Records one iterate; returns true when the threshold is met.
  bool record(const Vector& theta, double c) {
    r.cost_history.push_back(c);
    if (c < best) {
      best = c;
      r.theta_star = theta;
      r.final_cost = c;
    }
    return c < gamma;
  }
};

}  // namespace detail

inline VqlsResult solve_adagrad(CostFunction& f, const VqlsConfig& cfg, Vector theta) {
  VqlsResult r;
  detail::Tracker tr{r, cfg.gamma};
  Vector acc = Vector::Zero(theta.size());
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (tr.record(theta, f(theta, cfg.cost_variant))) {
      r.converged = true;
      break;
    }
    if (it + 1 == cfg.max_iters) break;
    const Vector g = f.gradient(theta, cfg.cost_variant);
    acc.array() += g.array().square();
    theta.array() -= cfg.adagrad_step * g.array() / (acc.array() + cfg.adagrad_eps).sqrt();
  }
  return r;
}

/// Derivative-free trust region on a linear interpolation model.
inline VqlsResult solve_cobyla(CostFunction& f, const VqlsConfig& cfg, Vector theta) {
  VqlsResult r;
  detail::Tracker tr{r, cfg.gamma};
  double rho = cfg.trust_radius_start;
  double fx = f(theta, cfg.cost_variant);
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (tr.record(theta, fx)) {
      r.converged = true;
      break;
    }
    if (rho < cfg.trust_radius_end) break;
    Vector slope(theta.size());
    Vector probe = theta;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      probe(j) = theta(j) + rho;
      slope(j) = (f(probe, cfg.cost_variant) - fx) / rho;
      probe(j) = theta(j);
    }
    const double norm = slope.norm();
    if (norm == 0.0) {
      rho *= 0.5;
      continue;
    }
    const Vector trial = theta - rho * slope / norm;
    const double ft = f(trial, cfg.cost_variant);
    if (ft < fx) {
      theta = trial;
      fx = ft;
    } else {
      rho *= 0.5;
    }
  }
  return r;
}

inline VqlsResult solve(CostFunction& f, const VqlsConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  Vector theta = beta_init(f.n_params(), cfg.init_a, cfg.init_b, rng);
  VqlsResult r = cfg.optimizer == OptimizerKind::adagrad ? solve_adagrad(f, cfg, theta) : solve_cobyla(f, cfg, theta);
  if (!f.exact() && cfg.optimizer == OptimizerKind::adagrad)
    r.warnings.push_back("parameter-shift gradient evaluated from sampled expectations");
  r.iterations_used = static_cast<int>(r.cost_history.size());
  r.solution_state = quantum::ansatz_state(r.theta_star, f.n_qubits(), f.layers());
  return r;
}

inline VqlsResult solve(const lcu::LcuDecomposition& a, const Circuit& b_circuit, const VqlsConfig& cfg) {
  CostFunction f(a, b_circuit, cfg.layers, cfg.evaluator, cfg.shots, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  return solve(f, cfg);
}

/// Dense reference Hamiltonians H_g = A^dag (I - |b><b|) A and
/// H_l = A^dag U_b (I - (1/n) sum_k |0_k><0_k|) U_b^dag A.
struct DenseHamiltonians {
  CMatrix a_dag_a, h_g, h_l;
};

inline DenseHamiltonians dense_hamiltonians(const CMatrix& a, const CMatrix& ub) {
  const Eigen::Index dim = a.rows();
  const int n = log2_exact(dim);
  const CVector b = ub.col(0);
  DenseHamiltonians h;
  h.a_dag_a = a.adjoint() * a;
  h.h_g = a.adjoint() * (CMatrix::Identity(dim, dim) - b * b.adjoint()) * a;
  CMatrix proj = CMatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < dim; ++i)
      if (!(static_cast<std::uint64_t>(i) & quantum::qubit_mask(k, n))) proj(i, i) += 1.0;
  h.h_l = a.adjoint() * ub * (CMatrix::Identity(dim, dim) - proj / static_cast<double>(n)) * ub.adjoint() * a;
  return h;
}

}  // namespace bvq::vqls
