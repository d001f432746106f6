#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bvq/errors.hpp"
#include "bvq/types.hpp"

namespace bvq::bo {

/// Matern-5/2 with one length-scale per input dimension.
struct Matern52 {
  Vector lengthscales;
  double signal_var = 1.0;

  double scaled_distance(const Vector& a, const Vector& b) const {
    return ((a - b).array() / lengthscales.array()).matrix().norm();
  }

  double operator()(const Vector& a, const Vector& b) const {
    const double r = scaled_distance(a, b);
    const double s5r = std::sqrt(5.0) * r;
    return signal_var * (1.0 + s5r + 5.0 * r * r / 3.0) * std::exp(-s5r);
  }

  Matrix gram(const Matrix& x) const {
    const Eigen::Index n = x.rows();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, i) = signal_var;
      for (Eigen::Index j = 0; j < i; ++j) k(i, j) = k(j, i) = (*this)(x.row(i).transpose(), x.row(j).transpose());
    }
    return k;
  }

  Vector cross(const Matrix& x, const Vector& p) const {
    Vector k(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) k(i) = (*this)(x.row(i).transpose(), p);
    return k;
  }
};

struct GpFitOptions {
  int restarts = 8;
  int max_steps = 200;
  double min_log_lengthscale = std::log(0.01);
  double max_log_lengthscale = std::log(20.0);
  std::uint64_t seed = 0;
};

/// Fixed-noise GP on inputs normalized to the unit box, with a GLS constant mean.
struct GpModel {
  Matern52 kernel;
  double mean = 0.0;
  Matrix x;       // normalized inputs, one row per point
  Vector y;
  Vector noise;   // per-point noise variances
  Vector lower, upper;
  double jitter = 0.0;
  double log_likelihood = 0.0;
  Eigen::LLT<Matrix> chol;  // of K + diag(noise) + jitter
  Vector alpha;             // (K + Sigma)^-1 (y - mean)

  Vector normalize(const Vector& p) const { return ((p - lower).array() / (upper - lower).array()).matrix(); }
  Vector denormalize(const Vector& u) const { return (lower.array() + u.array() * (upper - lower).array()).matrix(); }
  int dims() const { return static_cast<int>(lower.size()); }
};

struct Prediction {
  double mean = 0.0;
  double var = 0.0;
  double sd() const { return std::sqrt(var); }
};

namespace detail {

/// Cholesky with jitter escalation: 0, then 1e-12 s2 growing tenfold up to 1e-4 s2.
inline double robust_llt(const Matrix& c, double signal_var, Eigen::LLT<Matrix>& out) {
  const Eigen::Index n = c.rows();
  out.compute(c);
  if (out.info() == Eigen::Success) return 0.0;
  for (double j = 1e-12 * signal_var; j <= 1e-4 * signal_var * (1 + 1e-9); j *= 10.0) {
    out.compute(c + j * Matrix::Identity(n, n));
    if (out.info() == Eigen::Success) return j;
  }
  throw NumericalError("covariance matrix not positive definite after jitter escalation");
}

struct LmlResult {
  double value = -std::numeric_limits<double>::infinity();
  Vector grad;  // d/d(log l_1..log l_d, log s2)
};

inline double signal_floor(const Vector& y) {
  const double var = (y.array() - y.mean()).square().mean();
  return 1e-10 * std::max(1.0, var);
}

/// Log marginal likelihood with the constant mean profiled out by GLS.
inline LmlResult log_marginal(const Matrix& x, const Vector& y, const Vector& noise, const Vector& params, bool want_grad) {
  const int d = static_cast<int>(x.cols());
  const Eigen::Index n = x.rows();
  Matern52 k{params.head(d).array().exp().matrix(), std::exp(params(d))};
  Matrix kx = k.gram(x);
  Matrix c = kx;
  c.diagonal() += noise;
  Eigen::LLT<Matrix> llt;
  LmlResult res;
  try {
    robust_llt(c, k.signal_var, llt);
  } catch (const NumericalError&) {
    return res;
  }
  const Vector ones = Vector::Ones(n);
  const Vector ci1 = llt.solve(ones);
  const double m = ci1.dot(y) / ci1.sum();
  const Vector r = y.array() - m;
  const Vector a = llt.solve(r);
  const Matrix l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  res.value = -0.5 * r.dot(a) - 0.5 * logdet - 0.5 * n * std::log(2.0 * kPi);
  if (!want_grad) return res;
  const Matrix w = a * a.transpose() - llt.solve(Matrix::Identity(n, n));
  res.grad = Vector::Zero(d + 1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vector diff = x.row(i) - x.row(j);
      const double rr = k.scaled_distance(x.row(i).transpose(), x.row(j).transpose());
      const double s5r = std::sqrt(5.0) * rr;
      const double common = k.signal_var * (5.0 / 3.0) * (1.0 + s5r) * std::exp(-s5r);
      for (int p = 0; p < d; ++p) {
        const double q = diff(p) / k.lengthscales(p);
        res.grad(p) += 0.5 * w(i, j) * common * q * q;
      }
    }
  res.grad(d) = 0.5 * (w.array() * kx.array()).sum();
  return res;
}

}  // namespace detail

/// Refreshes the cached factorization for the given hyperparameters.
inline void gp_condition(GpModel& m) {
  Matrix c = m.kernel.gram(m.x);
  c.diagonal() += m.noise;
  m.jitter = detail::robust_llt(c, m.kernel.signal_var, m.chol);
  const Vector ones = Vector::Ones(m.x.rows());
  const Vector ci1 = m.chol.solve(ones);
  m.mean = ci1.dot(m.y) / ci1.sum();
  m.alpha = m.chol.solve((m.y.array() - m.mean).matrix());
}

/// Builds a model with given hyperparameters (no fitting). Inputs in original units.
inline GpModel gp_make(const Matrix& x, const Vector& y, const Vector& noise, const Vector& lower, const Vector& upper,
                       const Vector& lengthscales, double signal_var) {
  if (x.rows() != y.size() || noise.size() != y.size()) throw InvalidDimension("dataset size mismatch");
  if (x.cols() != lower.size() || lower.size() != upper.size()) throw InvalidDimension("bounds size mismatch");
  GpModel m;
  m.lower = lower;
  m.upper = upper;
  m.x.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) m.x.row(i) = m.normalize(x.row(i).transpose()).transpose();
  m.y = y;
  m.noise = noise;
  m.kernel = {lengthscales, signal_var};
  gp_condition(m);
  return m;
}

/// Maximum-likelihood fit: multi-start projected gradient ascent in log space.
inline GpModel gp_fit(const Matrix& x, const Vector& y, const Vector& noise, const Vector& lower, const Vector& upper,
                      const GpFitOptions& opt = {}) {
  if (x.rows() < 2) throw InvalidArgument("GP fit needs at least two points");
  if (x.rows() != y.size() || noise.size() != y.size()) throw InvalidDimension("dataset size mismatch");
  if ((noise.array() < 0.0).any()) throw InvalidArgument("noise variances must be non-negative");
  const int d = static_cast<int>(x.cols());
  GpModel proto = gp_make(x, y, noise, lower, upper, Vector::Constant(d, 0.5), 1.0);
  const Matrix& xn = proto.x;

  const double var_y = (y.array() - y.mean()).square().mean();
  const double floor = detail::signal_floor(y);
  const double lo_s = std::log(floor);
  const double hi_s = std::log(std::max(1e4 * std::max(var_y, floor), 1.0));
  Vector lo(d + 1), hi(d + 1);
  lo.head(d).setConstant(opt.min_log_lengthscale);
  hi.head(d).setConstant(opt.max_log_lengthscale);
  lo(d) = lo_s;
  hi(d) = hi_s;
  auto project = [&](Vector p) { return p.cwiseMax(lo).cwiseMin(hi); };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vector best_p;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opt.restarts); ++s) {
    Vector p(d + 1);
    if (s == 0) {
      p.head(d).setConstant(std::log(0.3));
      p(d) = std::log(std::max(var_y, floor));
    } else {
      for (int i = 0; i <= d; ++i) p(i) = lo(i) + u01(rng) * (hi(i) - lo(i));
    }
    p = project(p);
    auto cur = detail::log_marginal(xn, y, noise, p, true);
    if (!std::isfinite(cur.value)) continue;
    double step = 0.5;
    for (int it = 0; it < opt.max_steps && step > 1e-8; ++it) {
      const double gn = cur.grad.norm();
      if (gn < 1e-9) break;
      const Vector dir = cur.grad / gn;
      bool moved = false;
      while (step > 1e-8) {
        const Vector trial = project(p + step * dir);
        auto t = detail::log_marginal(xn, y, noise, trial, true);
        if (std::isfinite(t.value) && t.value > cur.value + 1e-12) {
          p = trial;
          cur = t;
          step *= 1.5;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (cur.value > best_v) {
      best_v = cur.value;
      best_p = p;
    }
  }
  if (best_p.size() == 0) throw NumericalError("GP likelihood could not be evaluated at any start");
  GpModel m = gp_make(x, y, noise, lower, upper, best_p.head(d).array().exp().matrix(), std::exp(best_p(d)));
  m.log_likelihood = best_v;
  return m;
}

/// Posterior mean and latent variance at p (original units).
inline Prediction gp_predict(const GpModel& m, const Vector& p) {
  const Vector u = m.normalize(p);
  const Vector ks = m.kernel.cross(m.x, u);
  Prediction out;
  out.mean = m.mean + ks.dot(m.alpha);
  out.var = std::max(0.0, m.kernel.signal_var - ks.dot(m.chol.solve(ks)));
  return out;
}

}  // namespace bvq::bo
