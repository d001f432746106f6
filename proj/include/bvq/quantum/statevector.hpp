#pragma once

#include <cmath>
#include <cstdint>

#include "bvq/errors.hpp"
#include "bvq/types.hpp"

namespace bvq::quantum {

/// Dense state over n qubits. Qubit 0 is the most significant bit of the index.
struct StateVector {
  int n_qubits = 0;
  CVector amplitudes;

  StateVector() = default;
  StateVector(int n, CVector amps) : n_qubits(n), amplitudes(std::move(amps)) {
    if (amplitudes.size() != (Eigen::Index{1} << n)) throw InvalidDimension("amplitude count must be 2^n");
  }

  static StateVector zero(int n) {
    CVector a = CVector::Zero(Eigen::Index{1} << n);
    a(0) = 1.0;
    return {n, std::move(a)};
  }

  static StateVector basis(int n, std::uint64_t index) {
    if (index >= (std::uint64_t{1} << n)) throw IndexOutOfRange("basis index out of range");
    CVector a = CVector::Zero(Eigen::Index{1} << n);
    a(static_cast<Eigen::Index>(index)) = 1.0;
    return {n, std::move(a)};
  }

  /// Normalizes a real or complex vector; throws on zero input.
  template <typename Derived>
  static StateVector from_vector(const Eigen::MatrixBase<Derived>& v) {
    if (!is_power_of_two(v.size())) throw PaddingRequired("state length must be a power of two");
    CVector a = v.template cast<Complex>();
    const double nrm = a.norm();
    if (!(nrm > 0.0)) throw InvalidArgument("cannot normalize the zero vector");
    return {log2_exact(v.size()), a / nrm};
  }

  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }

  Complex inner(const StateVector& other) const { return amplitudes.dot(other.amplitudes); }  // <this|other>

  double probability(std::uint64_t index) const { return std::norm(amplitudes(static_cast<Eigen::Index>(index))); }

  Vector real() const { return amplitudes.real(); }
};

inline int bit_of(std::uint64_t index, int qubit, int n) { return static_cast<int>((index >> (n - 1 - qubit)) & 1u); }

inline std::uint64_t qubit_mask(int qubit, int n) { return std::uint64_t{1} << (n - 1 - qubit); }

/// |<a|b>|, the global-phase-insensitive overlap.
inline double overlap(const StateVector& a, const StateVector& b) { return std::abs(a.inner(b)); }

}  // namespace bvq::quantum
