#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "bvq/errors.hpp"
#include "bvq/types.hpp"

namespace bvq::pde {

enum class Scheme { explicit_euler, implicit_euler };

inline const char* to_string(Scheme s) { return s == Scheme::explicit_euler ? "explicit" : "implicit"; }

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "explicit") return Scheme::explicit_euler;
  if (s == "implicit") return Scheme::implicit_euler;
  throw InvalidArgument("unknown scheme '" + s + "' (expected explicit|implicit)");
}

struct Bounds {
  double l_min = 2.0;
  double l_max = 4.0;
  double alpha_min = 0.2;
  double alpha_max = 0.3;
};

struct Weights {
  double w1 = 10.0;
  double w2 = 1.0;
  double w3 = 5.0;
};

struct DesignPoint {
  double l = 0.0;
  double alpha = 0.0;
};

struct HeatProblem {
  int n_x = 8;
  int n_t = 4;
  double dt = 0.25;
  double conductivity = 1.0;
  std::vector<double> flux;  // q^1..q^{M-1}
  Vector initial_temps;
  Bounds bounds;
  Weights weights;

  double horizon() const { return (n_t - 1) * dt; }
  double dy() const { return 1.0 / (n_x - 1); }
  int dimension() const { return n_x * n_t; }

  void validate() const {
    if (n_x < 2) throw InvalidDimension("n_x must be >= 2");
    if (n_t < 2) throw InvalidDimension("n_t must be >= 2");
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(conductivity > 0.0)) throw InvalidArgument("conductivity must be positive");
    if (weights.w1 < 0.0 || weights.w2 < 0.0 || weights.w3 < 0.0)
      throw InvalidArgument("weights must be non-negative");
    if (!(bounds.l_min < bounds.l_max)) throw InvalidArgument("l_min must be < l_max");
    if (!(bounds.alpha_min < bounds.alpha_max)) throw InvalidArgument("alpha_min must be < alpha_max");
    if (initial_temps.size() != n_x) throw InvalidDimension("initial_temps length must equal n_x");
    if (static_cast<int>(flux.size()) != n_t - 1) throw InvalidDimension("flux must have n_t - 1 entries");
  }

  bool contains(const DesignPoint& p, double tol = 1e-12) const {
    return p.l >= bounds.l_min - tol && p.l <= bounds.l_max + tol && p.alpha >= bounds.alpha_min - tol &&
           p.alpha <= bounds.alpha_max + tol;
  }
};

struct LinearSystem {
  Matrix matrix;
  Vector rhs;
  Scheme scheme = Scheme::implicit_euler;
  int n_x = 0;
  int n_t = 0;
};

/// Temperatures T(x_i, t_k); row k is time level k.
struct Trajectory {
  Matrix values;
  Vector times;
  Vector positions;

  Vector flatten() const {
    Vector out(values.size());
    for (Eigen::Index k = 0; k < values.rows(); ++k) out.segment(k * values.cols(), values.cols()) = values.row(k).transpose();
    return out;
  }

  void write_csv(std::ostream& os) const {
    os << "t,x,T\n";
    os.precision(12);
    for (Eigen::Index k = 0; k < values.rows(); ++k)
      for (Eigen::Index i = 0; i < values.cols(); ++i) os << times(k) << ',' << positions(i) << ',' << values(k, i) << '\n';
  }
};

inline Matrix build_laplacian(int n_x) {
  if (n_x < 2) throw InvalidDimension("laplacian needs n_x >= 2");
  Matrix a = Matrix::Zero(n_x, n_x);
  for (int i = 0; i < n_x; ++i) {
    a(i, i) = (i == 0 || i == n_x - 1) ? -1.0 : -2.0;
    if (i + 1 < n_x) a(i, i + 1) = a(i + 1, i) = 1.0;
  }
  return a;
}

/// Diffusion number c = alpha*dt/(l*dy)^2 of the rescaled problem.
inline double diffusion_number(const HeatProblem& problem, const DesignPoint& d) {
  const double ldy = d.l * problem.dy();
  return d.alpha * problem.dt / (ldy * ldy);
}

struct CflResult {
  double ratio = 0.0;
  bool pass = true;
};

inline CflResult cfl_check(const DesignPoint& d, const HeatProblem& problem) {
  const double r = diffusion_number(problem, d);
  return {r, r <= 0.5};
}

/// Flux coefficient dt/(k*l*dy) multiplying q^k on the boundary node.
inline double flux_coefficient(const HeatProblem& problem, const DesignPoint& d) {
  return problem.dt / (problem.conductivity * d.l * problem.dy());
}

inline Vector build_rhs(const HeatProblem& problem, const DesignPoint& d) {
  const int n = problem.n_x;
  Vector b = Vector::Zero(problem.dimension());
  b.head(n) = problem.initial_temps;
  const double f = flux_coefficient(problem, d);
  for (int k = 1; k < problem.n_t; ++k) b(k * n) = f * problem.flux[k - 1];
  return b;
}

/// Design-independent pieces: matrix = s1 - c*s2.
struct SystemParts {
  Matrix s1;
  Matrix s2;
};

inline SystemParts assemble_parts(const HeatProblem& problem, Scheme scheme) {
  const int n = problem.n_x;
  const int m = problem.n_t;
  const Matrix lap = build_laplacian(n);
  const Matrix eye = Matrix::Identity(n, n);
  SystemParts p{Matrix::Zero(n * m, n * m), Matrix::Zero(n * m, n * m)};
  for (int k = 0; k < m; ++k) {
    p.s1.block(k * n, k * n, n, n) = eye;
    if (k == 0) continue;
    p.s1.block(k * n, (k - 1) * n, n, n) = -eye;
    if (scheme == Scheme::explicit_euler)
      p.s2.block(k * n, (k - 1) * n, n, n) = lap;
    else
      p.s2.block(k * n, k * n, n, n) = lap;
  }
  return p;
}

inline LinearSystem assemble(const HeatProblem& problem, const DesignPoint& d, Scheme scheme, bool enforce_bounds = true) {
  problem.validate();
  if (!(d.l > 0.0)) throw InvalidArgument("thickness l must be positive");
  if (enforce_bounds && !problem.contains(d)) throw InvalidArgument("design point outside bounds");
  if (scheme == Scheme::explicit_euler) {
    auto cfl = cfl_check(d, problem);
    if (!cfl.pass) throw StabilityError(cfl.ratio);
  }
  const double c = diffusion_number(problem, d);
  SystemParts parts = assemble_parts(problem, scheme);
  LinearSystem sys;
  sys.matrix = parts.s1 - c * parts.s2;
  sys.rhs = build_rhs(problem, d);
  sys.scheme = scheme;
  sys.n_x = problem.n_x;
  sys.n_t = problem.n_t;
  return sys;
}

inline Vector classical_solve(const LinearSystem& system) {
  const Matrix& a = system.matrix;
  if (a.rows() != a.cols() || a.rows() != system.rhs.size()) throw InvalidDimension("system shape mismatch");
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& u = lu.matrixLU();
  const double scale = u.diagonal().cwiseAbs().maxCoeff();
  const double smallest = u.diagonal().cwiseAbs().minCoeff();
  if (!(scale > 0.0) || smallest <= 1e-14 * scale) throw SingularMatrix("matrix is singular to working precision");
  Vector x = lu.solve(system.rhs);
  const double res = (a * x - system.rhs).norm();
  if (res > 1e-10 * std::max(system.rhs.norm(), 1e-300)) throw SingularMatrix("residual too large; matrix ill-conditioned");
  return x;
}

inline Trajectory classical_time_march(const HeatProblem& problem, const DesignPoint& d, Scheme scheme,
                                       bool enforce_bounds = true) {
  problem.validate();
  if (enforce_bounds && !problem.contains(d)) throw InvalidArgument("design point outside bounds");
  if (scheme == Scheme::explicit_euler) {
    auto cfl = cfl_check(d, problem);
    if (!cfl.pass) throw StabilityError(cfl.ratio);
  }
  const int n = problem.n_x;
  const int m = problem.n_t;
  const double c = diffusion_number(problem, d);
  const double f = flux_coefficient(problem, d);
  const Matrix lap = build_laplacian(n);
  const Matrix eye = Matrix::Identity(n, n);

  Trajectory tr;
  tr.values.resize(m, n);
  tr.times.resize(m);
  tr.positions.resize(n);
  for (int i = 0; i < n; ++i) tr.positions(i) = d.l * i * problem.dy();
  for (int k = 0; k < m; ++k) tr.times(k) = k * problem.dt;

  Vector u = problem.initial_temps;
  tr.values.row(0) = u.transpose();
  Eigen::PartialPivLU<Matrix> step;
  if (scheme == Scheme::implicit_euler) step.compute(eye - c * lap);
  for (int k = 1; k < m; ++k) {
    Vector src = Vector::Zero(n);
    src(0) = f * problem.flux[k - 1];
    if (scheme == Scheme::explicit_euler)
      u = u + c * (lap * u) + src;
    else
      u = step.solve(u + src);
    tr.values.row(k) = u.transpose();
  }
  return tr;
}

inline Vector linear_initial_profile(int n_x, double left, double right) {
  return Vector::LinSpaced(n_x, left, right);
}

/// Default initial profile: linear from 2*dt*q/(k*dy) at x=0 down to half of it at x=l.
inline Vector default_initial_profile(int n_x, double dt, double q, double k) {
  const double t1 = 2.0 * dt * q / (k / (n_x - 1));
  return linear_initial_profile(n_x, t1, 0.5 * t1);
}

inline HeatProblem make_problem(int n_x, int n_t, double dt, double k, double q) {
  HeatProblem p;
  p.n_x = n_x;
  p.n_t = n_t;
  p.dt = dt;
  p.conductivity = k;
  p.flux.assign(n_t - 1, q);
  p.initial_temps = default_initial_profile(n_x, dt, q, k);
  return p;
}

/// The 5-qubit design study: N=8, M=4, dt=0.25, q=50, k=1.
inline HeatProblem reference_problem() { return make_problem(8, 4, 0.25, 1.0, 50.0); }

}  // namespace bvq::pde
