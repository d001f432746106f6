#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace bvq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

inline bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::int64_t v) {
  int n = 0;
  while ((std::int64_t{1} << n) < v) ++n;
  return n;
}

inline std::int64_t next_power_of_two(std::int64_t v) { return std::int64_t{1} << log2_exact(v); }

}  // namespace bvq
