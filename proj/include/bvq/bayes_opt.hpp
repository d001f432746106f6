#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bvq/bo/acquisition.hpp"
#include "bvq/bo/gaussian_process.hpp"
#include "bvq/bo/sobol.hpp"

namespace bvq::bo {

enum class AcquisitionKind { noisy_ei, ei };

struct BoConfig {
  int n_init = 10;
  int n_iter = 20;
  int n_mc = 128;
  AcquisitionKind acquisition = AcquisitionKind::noisy_ei;
  std::uint64_t seed = 0;
  GpFitOptions gp;
  AcquisitionOptions acq;
};

struct Observation {
  double mean = 0.0;
  double std_error = 0.0;
  bool ok = true;
};

struct BoRecord {
  int iter = 0;  // 0-based evaluation index
  Vector x;
  double mean = 0.0;
  double std_error = 0.0;
  bool ok = true;
  bool initial = false;
};

struct BoState {
  std::vector<BoRecord> records;
  Vector lower, upper;
  std::optional<GpModel> model;  // last fitted surrogate
  int best_index = -1;

  double best_observed() const {
    return best_index < 0 ? std::numeric_limits<double>::infinity() : records[best_index].mean;
  }
  const BoRecord& best() const { return records.at(best_index); }

  std::vector<double> best_so_far() const {
    std::vector<double> out;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
      if (r.ok) b = std::min(b, r.mean);
      out.push_back(b);
    }
    return out;
  }

  void dataset(Matrix& x, Vector& y, Vector& noise) const {
    int n = 0;
    for (const auto& r : records) n += r.ok;
    x.resize(n, lower.size());
    y.resize(n);
    noise.resize(n);
    int i = 0;
    for (const auto& r : records) {
      if (!r.ok) continue;
      x.row(i) = r.x.transpose();
      y(i) = r.mean;
      noise(i) = r.std_error * r.std_error;
      ++i;
    }
  }

  /// CSV with one row per evaluation; names label the input columns.
  void write_trace(std::ostream& os, const std::vector<std::string>& names) const {
    os << "iter";
    for (const auto& n : names) os << ',' << n;
    os << ",cost_mean,cost_stderr,best_so_far\n";
    os.precision(12);
    const auto best = best_so_far();
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& r = records[k];
      os << r.iter;
      for (Eigen::Index d = 0; d < r.x.size(); ++d) os << ',' << r.x(d);
      if (r.ok)
        os << ',' << r.mean << ',' << r.std_error;
      else
        os << ",nan,nan";
      os << ',' << best[k] << '\n';
    }
  }
};

using Objective = std::function<Observation(const Vector&, int)>;

inline void bo_record(BoState& s, BoRecord rec) {
  for (Eigen::Index d = 0; d < rec.x.size(); ++d)
    if (rec.x(d) < s.lower(d) - 1e-12 || rec.x(d) > s.upper(d) + 1e-12) throw InvalidArgument("infeasible point");
  s.records.push_back(std::move(rec));
  const auto& r = s.records.back();
  if (r.ok && (s.best_index < 0 || r.mean < s.best_observed())) s.best_index = static_cast<int>(s.records.size()) - 1;
}

/// Proposes the next design from the current dataset.
inline Vector bo_propose(BoState& s, const BoConfig& cfg, int iter) {
  Matrix x;
  Vector y, noise;
  s.dataset(x, y, noise);
  GpFitOptions gopt = cfg.gp;
  gopt.seed = cfg.gp.seed ^ (cfg.seed * 1315423911ULL + iter);
  s.model = gp_fit(x, y, noise, s.lower, s.upper, gopt);
  AcquisitionOptions aopt = cfg.acq;
  aopt.seed = cfg.acq.seed + cfg.seed * 7919ULL + iter;
  if (cfg.acquisition == AcquisitionKind::noisy_ei) {
    NoisyEiAcquisition acq(*s.model, cfg.n_mc, cfg.seed * 104729ULL + iter);
    return optimize_acquisition([&](const Vector& p) { return acq(p); }, s.lower, s.upper, aopt).point;
  }
  const double f_star = y.minCoeff();
  const GpModel& m = *s.model;
  return optimize_acquisition([&](const Vector& p) { return expected_improvement(m, p, f_star); }, s.lower, s.upper, aopt)
      .point;
}

/// Sobol initialization followed by surrogate-guided evaluations to a fixed budget.
inline BoState bo_loop(const Objective& objective, const Vector& lower, const Vector& upper, const BoConfig& cfg) {
  if (cfg.n_init < 1) throw InvalidArgument("need at least one initial point");
  if (cfg.n_iter < 0) throw InvalidArgument("iteration count must be non-negative");
  BoState s;
  s.lower = lower;
  s.upper = upper;
  const Matrix init = sobol_init(lower, upper, cfg.n_init, cfg.seed, true);
  int k = 0;
  for (int i = 0; i < cfg.n_init; ++i, ++k) {
    const Vector x = init.row(i).transpose();
    const Observation o = objective(x, k);
    bo_record(s, {k, x, o.mean, o.std_error, o.ok, true});
  }
  for (int it = 0; it < cfg.n_iter; ++it, ++k) {
    Matrix xs;
    Vector ys, ns;
    s.dataset(xs, ys, ns);
    Vector x;
    if (xs.rows() >= 2) {
      x = bo_propose(s, cfg, it);
    } else {
      // not enough successful points for a surrogate; keep sampling the sequence
      SobolSequence extra(static_cast<int>(lower.size()), true, cfg.seed);
      for (int skip = 0; skip <= k; ++skip) x = extra.next();
      x = (lower.array() + x.array() * (upper - lower).array()).matrix();
    }
    const Observation o = objective(x, k);
    bo_record(s, {k, x, o.mean, o.std_error, o.ok, false});
  }
  Matrix xs;
  Vector ys, ns;
  s.dataset(xs, ys, ns);
  if (xs.rows() >= 2) s.model = gp_fit(xs, ys, ns, lower, upper, cfg.gp);
  return s;
}

}  // namespace bvq::bo
