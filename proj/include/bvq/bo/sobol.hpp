#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "bvq/bo/sobol_tables.hpp"
#include "bvq/errors.hpp"
#include "bvq/types.hpp"

namespace bvq::bo {

/// Gray-code Sobol generator in up to 64 dimensions. The all-zero point at
/// index 0 is skipped, so the first unscrambled point is 0.5 in every coordinate.
/// Optional scrambling: random linear matrix scramble plus digital shift.
class SobolSequence {
 public:
  static constexpr int kBits = 32;
  static constexpr int kMaxDims = 1 + static_cast<int>(detail::kSobolInit.size());

  explicit SobolSequence(int dims, bool scramble = false, std::uint64_t seed = 0) : dims_(dims), scramble_(scramble) {
    if (dims < 1 || dims > kMaxDims) throw InvalidDimension("Sobol dimension must be in [1, " + std::to_string(kMaxDims) + "]");
    v_.assign(dims, {});
    for (int j = 0; j < kBits; ++j) v_[0][j] = std::uint32_t{1} << (kBits - 1 - j);
    for (int d = 1; d < dims; ++d) {
      const auto& init = detail::kSobolInit[d - 1];
      const int s = static_cast<int>(init.degree);
      auto& v = v_[d];
      for (int j = 0; j < s && j < kBits; ++j) v[j] = init.m[j] << (kBits - 1 - j);
      for (int j = s; j < kBits; ++j) {
        std::uint32_t x = v[j - s] ^ (v[j - s] >> s);
        for (int k = 1; k < s; ++k)
          if ((init.poly >> (s - 1 - k)) & 1u) x ^= v[j - k];
        v[j] = x;
      }
    }
    shift_.assign(dims, 0);
    if (scramble_) {
      std::mt19937_64 rng(seed);
      for (int d = 0; d < dims; ++d) {
        // lower-triangular binary matrix with unit diagonal, rows indexed from the MSB
        std::array<std::uint32_t, kBits> rows{};
        for (int r = 0; r < kBits; ++r) {
          std::uint32_t row = std::uint32_t{1} << (kBits - 1 - r);
          for (int c = 0; c < r; ++c)
            if (rng() & 1u) row |= std::uint32_t{1} << (kBits - 1 - c);
          rows[r] = row;
        }
        for (int j = 0; j < kBits; ++j) {
          std::uint32_t out = 0;
          for (int r = 0; r < kBits; ++r)
            if (__builtin_popcount(rows[r] & v_[d][j]) & 1) out |= std::uint32_t{1} << (kBits - 1 - r);
          v_[d][j] = out;
        }
        shift_[d] = static_cast<std::uint32_t>(rng() >> 32);
      }
    }
    state_ = shift_;
  }

  int dims() const { return dims_; }

  /// Next point in [0,1)^dims.
  Vector next() {
    ++index_;
    const int c = __builtin_ctzll(index_);
    if (c >= kBits) throw InvalidArgument("Sobol sequence exhausted");
    Vector p(dims_);
    for (int d = 0; d < dims_; ++d) {
      state_[d] ^= v_[d][c];
      p(d) = scramble_ ? (static_cast<double>(state_[d]) + 0.5) * kScale : static_cast<double>(state_[d]) * kScale;
    }
    return p;
  }

  /// n x dims matrix of consecutive points.
  Matrix draw(int n) {
    Matrix m(n, dims_);
    for (int i = 0; i < n; ++i) m.row(i) = next().transpose();
    return m;
  }

 private:
  static constexpr double kScale = 1.0 / 4294967296.0;
  int dims_;
  bool scramble_;
  std::vector<std::array<std::uint32_t, kBits>> v_;
  std::vector<std::uint32_t> shift_;
  std::vector<std::uint32_t> state_;
  std::uint64_t index_ = 0;
};

/// First n points mapped to the box [lower, upper].
inline Matrix sobol_init(const Vector& lower, const Vector& upper, int n, std::uint64_t seed, bool scramble = true) {
  if (n < 1) throw InvalidArgument("need at least one initial point");
  if (lower.size() != upper.size()) throw InvalidDimension("bounds size mismatch");
  SobolSequence s(static_cast<int>(lower.size()), scramble, seed);
  Matrix pts = s.draw(n);
  for (int i = 0; i < n; ++i) pts.row(i) = (lower.array() + pts.row(i).transpose().array() * (upper - lower).array()).transpose();
  return pts;
}

}  // namespace bvq::bo
