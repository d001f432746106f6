#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvq/errors.hpp"
#include "bvq/pde_model.hpp"
#include "bvq/types.hpp"

namespace bvq::bounds {

struct BoundReport {
  std::string quantity;
  double computed = 0.0;
  double bound = 0.0;
  bool satisfied = true;
  bool applicable = true;  // false when the bound's precondition fails
  std::map<std::string, double> inputs;
  std::string note;
};

inline BoundReport make_report(std::string quantity, double computed, double bound, std::map<std::string, double> inputs,
                               bool applicable = true) {
  BoundReport r{std::move(quantity), computed, bound, computed <= bound * (1.0 + 1e-9), applicable, std::move(inputs), {}};
  if (!applicable) r.note = "precondition not met";
  return r;
}

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive and finite");
}

inline double kappa_bound_explicit(double nu, double T, double h) {
  require_positive(nu, "nu");
  require_positive(h, "h");
  if (h * nu > 2.0 * (1.0 + 1e-12)) throw PreconditionError("explicit condition-number bound needs h*nu <= 2");
  return 12.0 * std::exp(nu * T) / (h * nu);
}

inline double kappa_bound_implicit(double nu, double T, double h, bool contraction) {
  require_positive(nu, "nu");
  require_positive(h, "h");
  if (h * nu > 0.5 * (1.0 + 1e-12)) throw PreconditionError("implicit condition-number bound needs h*nu <= 0.5");
  return contraction ? 2.5 * (T / h + 1.0) : 5.0 * std::exp(2.0 * nu * T) / (h * nu);
}

/// Inequality ||A_f|| <= 2 + h*nu.
inline double block_norm_bound(double nu, double h) { return 2.0 + h * nu; }

/// Pure-state trace distance sqrt(1 - |<phi|psi>|^2).
inline double trace_distance(const CVector& psi, const CVector& phi) {
  const double ov = std::norm(phi.dot(psi));
  return std::sqrt(std::max(0.0, 1.0 - ov));
}

/// Residual of (1 - |psi - phi|^2/2)^2 + rho^2 = 1. The global phase of psi is
/// aligned so that <phi|psi> is real and non-negative before taking the l2 distance.
inline double trace_l2_identity_check(const CVector& psi, const CVector& phi) {
  if (psi.size() != phi.size()) throw InvalidDimension("state sizes differ");
  const Complex ov = phi.dot(psi);
  const Complex phase = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : Complex(1.0);
  const double d2 = (psi * phase - phi).squaredNorm();
  const double rho = trace_distance(psi, phi);
  const double lhs = 1.0 - 0.5 * d2;
  return std::abs(lhs * lhs + rho * rho - 1.0);
}

enum class StepVariant { explicit_general, normal, implicit_contraction, implicit_general };

inline const char* to_string(StepVariant v) {
  switch (v) {
    case StepVariant::explicit_general: return "explicit";
    case StepVariant::normal: return "normal";
    case StepVariant::implicit_contraction: return "implicit-contraction";
    case StepVariant::implicit_general: return "implicit-general";
  }
  return "?";
}

inline StepVariant step_variant_from_string(const std::string& s) {
  if (s == "explicit") return StepVariant::explicit_general;
  if (s == "normal") return StepVariant::normal;
  if (s == "implicit-contraction") return StepVariant::implicit_contraction;
  if (s == "implicit-general") return StepVariant::implicit_general;
  throw InvalidArgument("unknown step-size variant: " + s);
}

/// Power of T in the error model |u_c - u~| <= C h^(1/2) T^p used by each variant.
inline double error_time_power(StepVariant v) {
  return (v == StepVariant::normal || v == StepVariant::implicit_contraction) ? 1.5 : 0.5;
}

/// h0 = min_j {2 delta_j / |lambda_j|^2, 2 / max|lambda|} over eigenvalues lambda_j = -delta_j + i omega_j.
/// Zero eigenvalues impose no constraint.
inline double h0_from_eigenvalues(const CVector& lambda) {
  double lmax = 0.0, h = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double m = std::abs(lambda(j));
    lmax = std::max(lmax, m);
    if (m > 1e-14) h = std::min(h, 2.0 * -lambda(j).real() / (m * m));
  }
  if (lmax > 0.0) h = std::min(h, 2.0 / lmax);
  if (!(h > 0.0)) throw PreconditionError("eigenvalues with positive real part; no stable step");
  return h;
}

/// Step size from the error-driven branch capped by the stability limit.
/// `h0` is only used by the normal variant; zero means 2/nu (real non-positive spectrum).
inline double step_size_select(double eps, double C, double T, double nu, StepVariant v, double norm_uc, double h0 = 0.0) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  require_positive(C, "C");
  require_positive(T, "T");
  require_positive(nu, "nu");
  require_positive(norm_uc, "norm_uc");
  const double e2 = eps * eps * norm_uc * norm_uc;
  switch (v) {
    case StepVariant::explicit_general: return std::min(e2 / (16.0 * C * C * T), 2.0 / nu);
    case StepVariant::normal: return std::min(e2 / (16.0 * C * C * T * T * T), h0 > 0.0 ? h0 : 2.0 / nu);
    case StepVariant::implicit_contraction: return std::min(e2 / (4.0 * C * C * T * T * T), 0.5 / nu);
    case StepVariant::implicit_general: return std::min(e2 / (4.0 * C * C * T), 0.5 / nu);
  }
  return 0.0;
}

inline double gamma_numerator(double eps) {
  const double a = 1.0 - eps * eps / 8.0;
  return 1.0 - a * a;
}

/// VQLS stopping threshold for the explicit scheme (log of the qubit count, base 2).
inline double gamma_threshold(double eps, double h, double nu, int N, int M) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (N <= 1 || M <= 1) throw InvalidArgument("N and M must exceed 1");
  require_positive(h, "h");
  require_positive(nu, "nu");
  const double T = (M - 1) * h;
  const double kb = 12.0 * std::exp(nu * T) / (h * nu);
  return gamma_numerator(eps) / (kb * kb * std::log2(double(N) * M) * (2.0 + h * nu));
}

inline double gamma_threshold_normal(double eps, int N, int M) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (N <= 1 || M <= 1) throw InvalidArgument("N and M must exceed 1");
  return gamma_numerator(eps) / (2.0 * std::pow(2.0 * M, 2) * std::log2(double(N) * M));
}

enum class Regime { explicit_general, explicit_normal, implicit_contraction, implicit_general };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::explicit_general: return "explicit";
    case Regime::explicit_normal: return "explicit-normal";
    case Regime::implicit_contraction: return "implicit-contraction";
    case Regime::implicit_general: return "implicit-general";
  }
  return "?";
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "explicit") return Regime::explicit_general;
  if (s == "explicit-normal") return Regime::explicit_normal;
  if (s == "implicit-contraction") return Regime::implicit_contraction;
  if (s == "implicit-general") return Regime::implicit_general;
  throw InvalidArgument("unknown regime: " + s);
}

// Scaling indicators: the asymptotic expressions with every hidden constant set to 1.
// log^8.5 uses the natural log floored at 1 so tiny arguments do not go negative.
inline double polylog(double x) { return std::pow(std::max(1.0, std::log(x)), 8.5); }

inline double query_complexity(double nu, double T, double N, double eps, double norm_uc, Regime r) {
  const double u2e2 = norm_uc * norm_uc * eps * eps;
  const double tail = std::log(1.0 / eps);
  switch (r) {
    case Regime::explicit_general: return polylog(N * T * T / u2e2) * T * std::exp(nu * T) / u2e2 * tail;
    case Regime::explicit_normal:
    case Regime::implicit_contraction: return polylog(N * std::pow(T, 4) / u2e2) * std::pow(T, 3) / u2e2 * tail;
    case Regime::implicit_general: return polylog(N * T * T / u2e2) * T * std::exp(2.0 * nu * T) / u2e2 * tail;
  }
  return 0.0;
}

inline double classical_explicit_cost(double s, double N, double T, double norm_uc, double eps) {
  return s * N * T * T / (norm_uc * norm_uc * eps * eps);
}

inline double classical_implicit_cost(double N, double T, double h) { return N * N * T / h; }

// ---- dense checks on the heat family ------------------------------------------

/// du/dt = A u + b with constant source, in the time units of the heat problem.
struct LinearOde {
  Matrix a;
  Vector b;
  Vector u0;
  double nu() const { return a.operatorNorm(); }
};

inline LinearOde heat_ode(const pde::HeatProblem& problem, const pde::DesignPoint& d) {
  LinearOde ode;
  const double c = pde::diffusion_number(problem, d);
  ode.a = (c / problem.dt) * pde::build_laplacian(problem.n_x);
  ode.b = Vector::Zero(problem.n_x);
  const double q = problem.flux.empty() ? 0.0 : problem.flux.front();
  ode.b(0) = pde::flux_coefficient(problem, d) * q / problem.dt;
  ode.u0 = problem.initial_temps;
  return ode;
}

/// Same physics and horizon resolved with n_t time levels; the initial profile is kept.
inline pde::HeatProblem with_time_levels(const pde::HeatProblem& problem, int n_t) {
  if (n_t < 2) throw InvalidArgument("need at least two time levels");
  pde::HeatProblem p = problem;
  const double q = problem.flux.empty() ? 0.0 : problem.flux.front();
  p.dt = problem.horizon() / (n_t - 1);
  p.n_t = n_t;
  p.flux.assign(n_t - 1, q);
  return p;
}

/// Block lower-bidiagonal system for M time levels with step h.
inline Matrix block_matrix(const Matrix& a, double h, int M, pde::Scheme scheme) {
  const Eigen::Index n = a.rows();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n * M, n * M);
  for (int k = 0; k < M; ++k) {
    out.block(k * n, k * n, n, n) = (k > 0 && scheme == pde::Scheme::implicit_euler) ? Matrix(eye - h * a) : eye;
    if (k == 0) continue;
    out.block(k * n, (k - 1) * n, n, n) = scheme == pde::Scheme::explicit_euler ? Matrix(-(eye + h * a)) : Matrix(-eye);
  }
  return out;
}

inline Vector block_rhs(const LinearOde& ode, double h, int M) {
  const Eigen::Index n = ode.u0.size();
  Vector r(n * M);
  r.head(n) = ode.u0;
  for (int k = 1; k < M; ++k) r.segment(k * n, n) = h * ode.b;
  return r;
}

/// Stacked Euler iterates at t = 0, h, ..., (M-1)h.
inline Vector euler_solution(const LinearOde& ode, double h, int M, pde::Scheme scheme) {
  const Eigen::Index n = ode.u0.size();
  const Matrix eye = Matrix::Identity(n, n);
  Vector out(n * M);
  Vector u = ode.u0;
  out.head(n) = u;
  Eigen::PartialPivLU<Matrix> lu;
  if (scheme == pde::Scheme::implicit_euler) lu.compute(eye - h * ode.a);
  for (int k = 1; k < M; ++k) {
    if (scheme == pde::Scheme::explicit_euler)
      u = u + h * (ode.a * u + ode.b);
    else
      u = lu.solve(u + h * ode.b);
    out.segment(k * n, n) = u;
  }
  return out;
}

/// Exact solution at the same time levels, via the eigendecomposition of symmetric A.
inline Vector exact_solution(const LinearOde& ode, double h, int M) {
  if (!ode.a.isApprox(ode.a.transpose(), 1e-12)) throw InvalidArgument("exact reference needs a symmetric generator");
  Eigen::SelfAdjointEigenSolver<Matrix> es(ode.a);
  const Matrix& v = es.eigenvectors();
  const Vector& lam = es.eigenvalues();
  const Vector w0 = v.transpose() * ode.u0;
  const Vector wb = v.transpose() * ode.b;
  const Eigen::Index n = ode.u0.size();
  Vector out(n * M);
  for (int k = 0; k < M; ++k) {
    const double t = k * h;
    Vector w(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double l = lam(j);
      const double phi = std::abs(l * t) < 1e-12 ? t : std::expm1(l * t) / l;
      w(j) = std::exp(l * t) * w0(j) + phi * wb(j);
    }
    out.segment(k * n, n) = v * w;
  }
  return out;
}

/// Largest per-time-level error, the norm in which Euler is first order.
inline double max_level_error(const Vector& a, const Vector& b, Eigen::Index n) {
  double e = 0.0;
  for (Eigen::Index k = 0; k * n < a.size(); ++k) e = std::max(e, (a.segment(k * n, n) - b.segment(k * n, n)).norm());
  return e;
}

inline double normalized_distance(const Vector& a, const Vector& b) { return (a / a.norm() - b / b.norm()).norm(); }

inline double condition_number(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

inline double inverse_norm(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a);
  return 1.0 / svd.singularValues().tail(1)(0);
}

/// Fidelity form of the cost bounds: rho^2 <= kappa^2 |A| C_g and rho^2 <= n kappa^2 |A| C_l.
inline std::vector<BoundReport> cost_error_reports(const Matrix& a, const CVector& psi, const CVector& exact, double cg,
                                                   double cl) {
  const double kappa = condition_number(a);
  const double nrm = a.operatorNorm();
  const int n = log2_exact(a.rows());
  const double rho = trace_distance(psi / psi.norm(), exact / exact.norm());
  std::map<std::string, double> in{{"kappa", kappa}, {"norm_A", nrm}, {"n", double(n)}, {"C_g", cg}, {"C_l", cl}};
  return {make_report("fidelity_vs_global_cost", rho * rho, kappa * kappa * nrm * cg, in),
          make_report("fidelity_vs_local_cost", rho * rho, n * kappa * kappa * nrm * cl, in)};
}

struct VerifyOptions {
  double eps = 0.05;  // accuracy target for the step-size check
  bool step_check = true;
};

/// Condition-number, norm and step-size checks for each design of the heat family.
inline std::vector<BoundReport> verify_bounds(const pde::HeatProblem& problem, const std::vector<pde::DesignPoint>& designs,
                                              const VerifyOptions& opt = {}) {
  problem.validate();
  std::vector<BoundReport> out;
  const double h = problem.dt;
  const int M = problem.n_t;
  const double T = problem.horizon();
  for (const auto& d : designs) {
    const LinearOde ode = heat_ode(problem, d);
    const double nu = ode.nu();
    std::map<std::string, double> in{{"l", d.l}, {"alpha", d.alpha}, {"nu", nu}, {"T", T}, {"h", h},
                                     {"N", double(problem.n_x)}, {"M", double(M)}};

    const Matrix af = block_matrix(ode.a, h, M, pde::Scheme::explicit_euler);
    const Matrix ab = block_matrix(ode.a, h, M, pde::Scheme::implicit_euler);
    const double kf = condition_number(af), kb = condition_number(ab);

    const bool f_ok = h * nu <= 2.0;
    out.push_back(make_report("kappa_explicit", kf, f_ok ? kappa_bound_explicit(nu, T, h) : 12.0 * std::exp(nu * T) / (h * nu), in, f_ok));
    out.push_back(make_report("norm_explicit", af.operatorNorm(), block_norm_bound(nu, h), in));

    const Matrix step = Matrix::Identity(problem.n_x, problem.n_x) - h * ode.a;
    const bool contraction = inverse_norm(step) <= 1.0 + 1e-12;
    const bool b_ok = h * nu <= 0.5;
    const double kb_bound = contraction ? 2.5 * (T / h + 1.0) : 5.0 * std::exp(2.0 * nu * T) / (h * nu);
    auto rb = make_report(contraction ? "kappa_implicit_contraction" : "kappa_implicit_general", kb,
                          b_ok ? kappa_bound_implicit(nu, T, h, contraction) : kb_bound, in, b_ok);
    out.push_back(rb);
    out.push_back(make_report("norm_implicit", ab.operatorNorm(), block_norm_bound(nu, h), in));

    if (!opt.step_check) continue;
    // Euler step-size selection with C calibrated on the problem's own step.
    for (auto [scheme, variant] : {std::pair{pde::Scheme::explicit_euler, StepVariant::normal},
                                   std::pair{pde::Scheme::implicit_euler, StepVariant::implicit_contraction}}) {
      const double h_cal = std::min(h, scheme == pde::Scheme::explicit_euler ? 2.0 / nu : 0.5 / nu);
      const int m_cal = std::max(2, static_cast<int>(std::ceil(T / h_cal - 1e-9)) + 1);
      const double hc = T / (m_cal - 1);
      const Vector uc = exact_solution(ode, hc, m_cal);
      const double err = (uc - euler_solution(ode, hc, m_cal, scheme)).norm();
      const double C = std::max(err, 1e-300) / (std::sqrt(hc) * std::pow(T, error_time_power(variant)));
      const double hs = step_size_select(opt.eps, C, T, nu, variant, uc.norm());
      const int ms = static_cast<int>(std::ceil(T / hs - 1e-9)) + 1;
      const double hh = T / (ms - 1);
      const double e = normalized_distance(exact_solution(ode, hh, ms), euler_solution(ode, hh, ms, scheme));
      auto in2 = in;
      in2["eps"] = opt.eps;
      in2["C"] = C;
      in2["h_selected"] = hh;
      out.push_back(make_report(std::string("euler_error_") + pde::to_string(scheme), e, opt.eps, in2));
    }
  }
  return out;
}

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j{{"quantity", r.quantity}, {"computed", r.computed}, {"bound", r.bound},
                   {"satisfied", r.satisfied}, {"applicable", r.applicable}, {"inputs", r.inputs}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline nlohmann::json to_json(const std::vector<BoundReport>& rs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rs) j.push_back(to_json(r));
  return j;
}

inline void write_table(std::ostream& os, const std::vector<BoundReport>& rs) {
  os << std::left << std::setw(28) << "quantity" << std::setw(8) << "l" << std::setw(8) << "alpha" << std::setw(14)
     << "computed" << std::setw(14) << "bound" << "status\n";
  for (const auto& r : rs) {
    auto get = [&](const char* k) { auto it = r.inputs.find(k); return it == r.inputs.end() ? 0.0 : it->second; };
    const char* status = !r.applicable ? "n/a" : (r.satisfied ? "ok" : "VIOLATED");
    os << std::left << std::setw(28) << r.quantity << std::setw(8) << get("l") << std::setw(8) << get("alpha")
       << std::setw(14) << std::setprecision(6) << r.computed << std::setw(14) << r.bound << status << '\n';
  }
}

/// All applicable reports satisfied.
inline bool all_satisfied(const std::vector<BoundReport>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const BoundReport& r) { return !r.applicable || r.satisfied; });
}

}  // namespace bvq::bounds
