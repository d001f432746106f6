#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bvq/errors.hpp"
#include "bvq/pde_model.hpp"
#include "bvq/types.hpp"

namespace bvq::lcu {

/// Word over {I,X,Y,Z}; character 0 acts on qubit 0, the most significant bit.
using PauliWord = std::string;

inline constexpr double kPruneThreshold = 1e-12;

struct LcuTerm {
  Complex coeff;
  PauliWord word;
};

struct LcuDecomposition {
  std::vector<LcuTerm> terms;
  int n_qubits = 0;

  std::size_t size() const { return terms.size(); }
};

inline void validate_word(const PauliWord& w) {
  for (char c : w)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw InvalidArgument("invalid Pauli character in '" + w + "'");
}

/// Bit mask of qubits flipped by the word (X or Y), big-endian.
inline std::uint64_t x_mask(const PauliWord& w) {
  const int n = static_cast<int>(w.size());
  std::uint64_t m = 0;
  for (int q = 0; q < n; ++q)
    if (w[q] == 'X' || w[q] == 'Y') m |= std::uint64_t{1} << (n - 1 - q);
  return m;
}

inline std::uint64_t z_mask(const PauliWord& w) {
  const int n = static_cast<int>(w.size());
  std::uint64_t m = 0;
  for (int q = 0; q < n; ++q)
    if (w[q] == 'Z' || w[q] == 'Y') m |= std::uint64_t{1} << (n - 1 - q);
  return m;
}

inline int count_y(const PauliWord& w) { return static_cast<int>(std::count(w.begin(), w.end(), 'Y')); }

/// Matrix element <row| W |col>; nonzero only when col = row ^ x_mask.
/// W|j> = i^{nY} (-1)^{popcount(j & zmask)} |j ^ xmask>, with Y = i X Z.
inline Complex word_phase(std::uint64_t col, std::uint64_t zm, int n_y) {
  static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int parity = __builtin_popcountll(col & zm) & 1;
  Complex ph = ipow[n_y & 3];
  return parity ? -ph : ph;
}

inline CMatrix word_matrix(const PauliWord& w) {
  validate_word(w);
  const std::uint64_t dim = std::uint64_t{1} << w.size();
  const std::uint64_t xm = x_mask(w), zm = z_mask(w);
  const int ny = count_y(w);
  CMatrix m = CMatrix::Zero(dim, dim);
  for (std::uint64_t col = 0; col < dim; ++col) m(col ^ xm, col) = word_phase(col, zm, ny);
  return m;
}

/// Single-qubit product a*b = phase * c.
inline std::pair<Complex, char> multiply_char(char a, char b) {
  const Complex i1{0, 1};
  if (a == 'I') return {1.0, b};
  if (b == 'I') return {1.0, a};
  if (a == b) return {1.0, 'I'};
  if (a == 'X' && b == 'Y') return {i1, 'Z'};
  if (a == 'Y' && b == 'X') return {-i1, 'Z'};
  if (a == 'Y' && b == 'Z') return {i1, 'X'};
  if (a == 'Z' && b == 'Y') return {-i1, 'X'};
  if (a == 'Z' && b == 'X') return {i1, 'Y'};
  return {-i1, 'Y'};  // X*Z
}

/// Symbolic product of two words: a*b = phase * word.
inline std::pair<Complex, PauliWord> multiply(const PauliWord& a, const PauliWord& b) {
  if (a.size() != b.size()) throw InvalidDimension("word length mismatch");
  Complex phase = 1.0;
  PauliWord out(a.size(), 'I');
  for (std::size_t q = 0; q < a.size(); ++q) {
    auto [p, c] = multiply_char(a[q], b[q]);
    phase *= p;
    out[q] = c;
  }
  return {phase, out};
}

namespace detail {

inline int qubits_for(Eigen::Index rows, Eigen::Index cols) {
  if (rows != cols) throw InvalidDimension("matrix must be square");
  if (!is_power_of_two(rows)) throw PaddingRequired("dimension " + std::to_string(rows) + " is not a power of two");
  return log2_exact(rows);
}

inline LcuDecomposition canonical(std::map<PauliWord, Complex> acc, int n) {
  LcuDecomposition out;
  out.n_qubits = n;
  for (auto& [w, c] : acc)
    if (std::abs(c) >= kPruneThreshold) out.terms.push_back({c, w});
  return out;  // std::map iterates in lexicographic order
}

inline void all_words(int n, PauliWord& cur, std::vector<PauliWord>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (char c : {'I', 'X', 'Y', 'Z'}) {
    cur.push_back(c);
    all_words(n, cur, out);
    cur.pop_back();
  }
}

inline void slice(const CMatrix& a, PauliWord& prefix, std::map<PauliWord, Complex>& acc) {
  if (a.rows() == 1) {
    acc[prefix] += a(0, 0);
    return;
  }
  if (a.cwiseAbs().maxCoeff() < kPruneThreshold) return;
  const Eigen::Index h = a.rows() / 2;
  const CMatrix a00 = a.topLeftCorner(h, h), a01 = a.topRightCorner(h, h);
  const CMatrix a10 = a.bottomLeftCorner(h, h), a11 = a.bottomRightCorner(h, h);
  const Complex i1{0, 1};
  const CMatrix parts[4] = {(a00 + a11) / 2.0, (a01 + a10) / 2.0, i1 * (a01 - a10) / 2.0, (a00 - a11) / 2.0};
  const char names[4] = {'I', 'X', 'Y', 'Z'};
  for (int p = 0; p < 4; ++p) {
    prefix.push_back(names[p]);
    slice(parts[p], prefix, acc);
    prefix.pop_back();
  }
}

}  // namespace detail

/// alpha_P = Tr(P A) / 2^n over every word.
template <typename Derived>
LcuDecomposition decompose_trace(const Eigen::MatrixBase<Derived>& a) {
  const int n = detail::qubits_for(a.rows(), a.cols());
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<PauliWord> words;
  PauliWord cur;
  detail::all_words(n, cur, words);
  std::map<PauliWord, Complex> acc;
  for (const auto& w : words) {
    const std::uint64_t xm = x_mask(w), zm = z_mask(w);
    const int ny = count_y(w);
    Complex tr = 0.0;
    // Tr(P A) = sum_col P(col^xm, col) * A(col, col^xm)
    for (std::uint64_t col = 0; col < dim; ++col) tr += word_phase(col, zm, ny) * Complex(a(col, col ^ xm));
    acc[w] = tr / static_cast<double>(dim);
  }
  return detail::canonical(std::move(acc), n);
}

/// Recursive 2x2-block slicing; the same terms as decompose_trace.
template <typename Derived>
LcuDecomposition decompose_sliced(const Eigen::MatrixBase<Derived>& a) {
  const int n = detail::qubits_for(a.rows(), a.cols());
  CMatrix c = a.template cast<Complex>();
  std::map<PauliWord, Complex> acc;
  PauliWord prefix;
  if (n == 0) {
    acc[""] = c(0, 0);
  } else {
    detail::slice(c, prefix, acc);
  }
  return detail::canonical(std::move(acc), n);
}

inline CMatrix reconstruct(const LcuDecomposition& lcu) {
  const std::uint64_t dim = std::uint64_t{1} << lcu.n_qubits;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const auto& t : lcu.terms) {
    if (static_cast<int>(t.word.size()) != lcu.n_qubits) throw InvalidDimension("term word length mismatch");
    const std::uint64_t xm = x_mask(t.word), zm = z_mask(t.word);
    const int ny = count_y(t.word);
    for (std::uint64_t col = 0; col < dim; ++col) m(col ^ xm, col) += t.coeff * word_phase(col, zm, ny);
  }
  return m;
}

/// Sum of two decompositions with scalar weights, merged and pruned.
inline LcuDecomposition combine(const LcuDecomposition& a, Complex wa, const LcuDecomposition& b, Complex wb) {
  if (a.n_qubits != b.n_qubits) throw InvalidDimension("qubit count mismatch");
  std::map<PauliWord, Complex> acc;
  for (const auto& t : a.terms) acc[t.word] += wa * t.coeff;
  for (const auto& t : b.terms) acc[t.word] += wb * t.coeff;
  return detail::canonical(std::move(acc), a.n_qubits);
}

/// Embeds a into the next power-of-two size with identity on the padding block.
inline Matrix pad_matrix(const Matrix& a, double diag = 1.0) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = next_power_of_two(n);
  if (p == n) return a;
  Matrix out = Matrix::Zero(p, p);
  out.topLeftCorner(n, n) = a;
  for (Eigen::Index i = n; i < p; ++i) out(i, i) = diag;
  return out;
}

inline Vector pad_vector(const Vector& v) {
  const Eigen::Index p = next_power_of_two(v.size());
  Vector out = Vector::Zero(p);
  out.head(v.size()) = v;
  return out;
}

/// Decompositions of the design-independent parts; A(design) = s1 - c(design) s2.
struct SeparableLcu {
  LcuDecomposition base1;
  LcuDecomposition base2;
  double dt = 0.0;
  double dy = 0.0;

  double coefficient(const pde::DesignPoint& d) const {
    const double ldy = d.l * dy;
    return d.alpha * dt / (ldy * ldy);
  }
};

inline SeparableLcu build_separable(const pde::HeatProblem& problem, pde::Scheme scheme) {
  auto parts = pde::assemble_parts(problem, scheme);
  SeparableLcu s;
  s.base1 = decompose_sliced(pad_matrix(parts.s1, 1.0));
  s.base2 = decompose_sliced(pad_matrix(parts.s2, 0.0));
  s.dt = problem.dt;
  s.dy = problem.dy();
  return s;
}

inline LcuDecomposition recombine(const SeparableLcu& cache, const pde::DesignPoint& d) {
  return combine(cache.base1, 1.0, cache.base2, -cache.coefficient(d));
}

inline nlohmann::json to_json(const LcuDecomposition& lcu) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : lcu.terms) arr.push_back({{"coeff_re", t.coeff.real()}, {"coeff_im", t.coeff.imag()}, {"word", t.word}});
  return arr;
}

inline LcuDecomposition from_json(const nlohmann::json& j) {
  LcuDecomposition out;
  std::map<PauliWord, Complex> acc;
  int n = -1;
  for (const auto& e : j) {
    PauliWord w = e.at("word").get<std::string>();
    validate_word(w);
    if (n >= 0 && static_cast<int>(w.size()) != n) throw InvalidDimension("inconsistent word lengths");
    n = static_cast<int>(w.size());
    acc[w] += Complex(e.at("coeff_re").get<double>(), e.at("coeff_im").get<double>());
  }
  return detail::canonical(std::move(acc), std::max(n, 0));
}

}  // namespace bvq::lcu
