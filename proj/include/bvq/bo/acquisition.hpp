#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "bvq/bo/gaussian_process.hpp"
#include "bvq/bo/sobol.hpp"

namespace bvq::bo {

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal quantile needs p in (0, 1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

/// Closed-form expected improvement for minimization.
inline double expected_improvement(double mu, double sigma, double f_star) {
  if (sigma <= 0.0) return std::max(0.0, f_star - mu);
  const double z = (f_star - mu) / sigma;
  return std::max(0.0, (f_star - mu) * normal_cdf(z) + sigma * normal_pdf(z));
}

inline double expected_improvement(const GpModel& m, const Vector& p, double f_star) {
  const Prediction pr = gp_predict(m, p);
  return expected_improvement(pr.mean, pr.sd(), f_star);
}

/// Monte-Carlo EI under noisy observations. Latent values at the training inputs
/// are drawn from their posterior given the noisy data using quasi-random normals;
/// each draw conditions a noiseless GP whose EI (with its own incumbent) is averaged.
class NoisyEiAcquisition {
 public:
  NoisyEiAcquisition(const GpModel& model, int n_samples, std::uint64_t seed) : model_(model) {
    if (n_samples < 1) throw InvalidArgument("noisy EI needs at least one sample");
    const Eigen::Index n = model.x.rows();
    const Matrix k = model.kernel.gram(model.x);
    const Vector resid = model.y.array() - model.mean;
    const Vector post_mean = (model.mean + (k * model.chol.solve(resid)).array()).matrix();
    Matrix post_cov = k - k * model.chol.solve(k);
    post_cov = 0.5 * (post_cov + post_cov.transpose()).eval();
    Eigen::LLT<Matrix> lc;
    detail::robust_llt(post_cov, model.kernel.signal_var, lc);
    const Matrix lambda = lc.matrixL();

    const Matrix z = standard_normals(static_cast<int>(n), n_samples, seed);
    samples_.resize(n, n_samples);
    for (int s = 0; s < n_samples; ++s) samples_.col(s) = post_mean + lambda * z.col(s);

    // noiseless conditioning on each sample
    Matrix kc = k;
    jitter_ = detail::robust_llt(kc, model.kernel.signal_var, kchol_);
    if (kchol_.info() != Eigen::Success) throw NumericalError("noiseless kernel factorization failed");
    weights_ = kchol_.solve((samples_.array() - model.mean).matrix());
    incumbents_ = samples_.colwise().minCoeff().transpose();
  }

  double operator()(const Vector& p) const {
    const Vector u = model_.normalize(p);
    const Vector ks = model_.kernel.cross(model_.x, u);
    const double var = std::max(0.0, model_.kernel.signal_var - ks.dot(kchol_.solve(ks)));
    const double sd = std::sqrt(var);
    const Vector mus = (model_.mean + (weights_.transpose() * ks).array()).matrix();
    double acc = 0.0;
    for (Eigen::Index s = 0; s < mus.size(); ++s) acc += expected_improvement(mus(s), sd, incumbents_(s));
    return acc / static_cast<double>(mus.size());
  }

  int n_samples() const { return static_cast<int>(samples_.cols()); }
  const Matrix& samples() const { return samples_; }

 private:
  static Matrix standard_normals(int dims, int count, std::uint64_t seed) {
    Matrix z(dims, count);
    if (dims <= SobolSequence::kMaxDims) {
      SobolSequence s(dims, true, seed);
      for (int c = 0; c < count; ++c) {
        const Vector u = s.next();
        for (int d = 0; d < dims; ++d) z(d, c) = normal_quantile(u(d));
      }
    } else {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> nd;
      for (int c = 0; c < count; ++c)
        for (int d = 0; d < dims; ++d) z(d, c) = nd(rng);
    }
    return z;
  }

  GpModel model_;
  Matrix samples_;
  Matrix weights_;
  Vector incumbents_;
  Eigen::LLT<Matrix> kchol_;
  double jitter_ = 0.0;
};

inline double noisy_ei(const GpModel& model, const Vector& p, int n_samples, std::uint64_t seed) {
  return NoisyEiAcquisition(model, n_samples, seed)(p);
}

struct AcquisitionOptions {
  int starts = 32;
  double initial_step = 0.25;
  double min_step = 1e-6;
  int max_evals_per_start = 2000;
  std::uint64_t seed = 0;
};

struct AcquisitionResult {
  Vector point;  // original units
  double value = -std::numeric_limits<double>::infinity();
};

/// Maximizes f over the box by projected compass search from Sobol starts.
inline AcquisitionResult optimize_acquisition(const std::function<double(const Vector&)>& f, const Vector& lower,
                                              const Vector& upper, const AcquisitionOptions& opt = {}) {
  const int d = static_cast<int>(lower.size());
  auto to_box = [&](const Vector& u) { return (lower.array() + u.array() * (upper - lower).array()).matrix(); };
  SobolSequence starts(d, true, opt.seed);
  AcquisitionResult best;
  for (int s = 0; s < opt.starts; ++s) {
    Vector u = starts.next();
    double fu = f(to_box(u));
    double step = opt.initial_step;
    int evals = 1;
    while (step >= opt.min_step && evals < opt.max_evals_per_start) {
      Vector best_u = u;
      double best_f = fu;
      for (int i = 0; i < d; ++i)
        for (double sign : {1.0, -1.0}) {
          Vector t = u;
          t(i) = std::clamp(t(i) + sign * step, 0.0, 1.0);
          if (t(i) == u(i)) continue;
          const double ft = f(to_box(t));
          ++evals;
          if (ft > best_f) {
            best_f = ft;
            best_u = t;
          }
        }
      if (best_f > fu) {
        u = best_u;
        fu = best_f;
      } else {
        step *= 0.5;
      }
    }
    if (fu > best.value) {
      best.value = fu;
      best.point = to_box(u);
    }
  }
  return best;
}

}  // namespace bvq::bo
