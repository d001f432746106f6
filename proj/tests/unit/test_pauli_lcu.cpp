#include <catch_amalgamated.hpp>

#include <random>

#include "bvq/pauli_lcu.hpp"

using namespace bvq;
using namespace bvq::lcu;

namespace {

// Kronecker expansion of a word, built from 2x2 Pauli matrices.
CMatrix kron_word(const PauliWord& w) {
  const Complex i1{0, 1};
  CMatrix out = CMatrix::Identity(1, 1);
  for (char c : w) {
    CMatrix p(2, 2);
    if (c == 'I') p << 1, 0, 0, 1;
    if (c == 'X') p << 0, 1, 1, 0;
    if (c == 'Y') p << 0, -i1, i1, 0;
    if (c == 'Z') p << 1, 0, 0, -1;
    CMatrix k(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index s = 0; s < out.cols(); ++s) k.block(2 * r, 2 * s, 2, 2) = out(r, s) * p;
    out = k;
  }
  return out;
}

Matrix random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = nd(rng);
  return m;
}

bool same_terms(const LcuDecomposition& a, const LcuDecomposition& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.terms[i].word != b.terms[i].word || std::abs(a.terms[i].coeff - b.terms[i].coeff) > tol) return false;
  return true;
}

pde::HeatProblem family(int n_x, int n_t) { return pde::make_problem(n_x, n_t, 0.25, 1.0, 50.0); }

}  // namespace

TEST_CASE("word matrices match kronecker products", "[lcu]") {
  for (PauliWord w : {"I", "X", "Y", "Z", "XY", "ZYX", "YYIZ"}) CHECK((word_matrix(w) - kron_word(w)).norm() < 1e-15);
}

TEST_CASE("symbolic word products", "[lcu]") {
  for (PauliWord a : {"XY", "ZI", "YZ", "XX"})
    for (PauliWord b : {"YX", "IZ", "ZZ", "XY"}) {
      auto [ph, w] = multiply(a, b);
      CHECK((ph * word_matrix(w) - word_matrix(a) * word_matrix(b)).norm() < 1e-14);
    }
}

TEST_CASE("trace decomposition basics", "[lcu]") {
  auto id = decompose_trace(Matrix::Identity(2, 2));
  REQUIRE(id.size() == 1);
  CHECK(id.terms[0].word == "I");
  CHECK(std::abs(id.terms[0].coeff - Complex(1.0)) < 1e-15);
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  auto dx = decompose_trace(x);
  REQUIRE(dx.size() == 1);
  CHECK(dx.terms[0].word == "X");
  CHECK_THROWS_AS(decompose_trace(Matrix::Identity(3, 3)), PaddingRequired);
  CHECK_THROWS_AS(decompose_sliced(Matrix::Identity(6, 6)), PaddingRequired);
}

TEST_CASE("reconstruct", "[lcu]") {
  LcuDecomposition one{{{1.0, "I"}}, 1};
  CHECK((reconstruct(one) - CMatrix::Identity(2, 2)).norm() == 0.0);
  LcuDecomposition two{{{0.5, "IX"}, {0.5, "XI"}}, 2};
  CMatrix expect = 0.5 * kron_word("IX") + 0.5 * kron_word("XI");
  CMatrix got = reconstruct(two);
  CHECK((got - expect).norm() < 1e-15);
  CHECK(got(0, 1) == Complex(0.5));
  CHECK(got(0, 2) == Complex(0.5));
  CHECK(got(0, 3) == Complex(0.0));
  CHECK((got - got.adjoint()).norm() == 0.0);
}

TEST_CASE("trace and sliced decompositions agree on random matrices", "[lcu]") {
  std::mt19937_64 rng(11);
  for (int dim : {4, 8, 16}) {
    for (int rep = 0; rep < 100; ++rep) {
      Matrix a = random_matrix(dim, rng);
      auto t = decompose_trace(a);
      auto s = decompose_sliced(a);
      REQUIRE(same_terms(t, s, 1e-12));
      CHECK((reconstruct(s) - a.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  Matrix sym = random_matrix(8, rng);
  sym = (sym + sym.transpose()).eval();
  CHECK((reconstruct(decompose_trace(sym)) - sym.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("real matrices give real even-Y and imaginary odd-Y coefficients", "[lcu]") {
  std::mt19937_64 rng(5);
  Matrix a = random_matrix(16, rng);
  auto d = decompose_sliced(a);
  for (const auto& t : d.terms) {
    if (count_y(t.word) % 2 == 0)
      CHECK(std::abs(t.coeff.imag()) < 1e-14);
    else
      CHECK(std::abs(t.coeff.real()) < 1e-14);
  }
  CHECK(reconstruct(d).imag().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("implicit heat family term counts", "[lcu]") {
  const pde::DesignPoint d{3.0, 0.25};
  CHECK(decompose_sliced(pde::assemble(family(2, 4), d, pde::Scheme::implicit_euler).matrix).size() == 14);
  CHECK(decompose_sliced(pde::assemble(family(4, 4), d, pde::Scheme::implicit_euler).matrix).size() == 26);
  CHECK(decompose_sliced(pde::assemble(family(4, 8), d, pde::Scheme::implicit_euler).matrix).size() == 54);
  for (auto [n, m] : {std::pair{2, 4}, {4, 4}, {4, 8}, {8, 4}, {8, 8}}) {
    Matrix a = pde::assemble(family(n, m), d, pde::Scheme::implicit_euler).matrix;
    CHECK((reconstruct(decompose_sliced(a)) - a.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("separable recombination", "[lcu]") {
  pde::HeatProblem p = family(8, 4);
  p.bounds.alpha_min = 0.0;
  auto cache = build_separable(p, pde::Scheme::implicit_euler);
  CHECK(same_terms(recombine(cache, {3.0, 0.0}), cache.base1, 0.0));

  const pde::DesignPoint d{2.0, 0.3};
  auto fresh = decompose_sliced(pde::assemble(p, d, pde::Scheme::implicit_euler).matrix);
  CHECK(same_terms(recombine(cache, d), fresh, 1e-12));

  // every coefficient is affine in c
  const pde::DesignPoint d1{2.0, 0.2}, d2{3.0, 0.25}, d3{4.0, 0.3};
  auto r1 = recombine(cache, d1), r2 = recombine(cache, d2), r3 = recombine(cache, d3);
  const double c1 = cache.coefficient(d1), c2 = cache.coefficient(d2), c3 = cache.coefficient(d3);
  auto coeff = [](const LcuDecomposition& l, const PauliWord& w) {
    for (const auto& t : l.terms)
      if (t.word == w) return t.coeff;
    return Complex(0.0);
  };
  for (const auto& t : fresh.terms) {
    const Complex s12 = (coeff(r2, t.word) - coeff(r1, t.word)) / (c2 - c1);
    const Complex s13 = (coeff(r3, t.word) - coeff(r1, t.word)) / (c3 - c1);
    CHECK(std::abs(s12 - s13) < 1e-10);
  }
}

TEST_CASE("padding and json", "[lcu]") {
  Matrix a = Matrix::Constant(3, 3, 2.0);
  Matrix p = pad_matrix(a);
  REQUIRE(p.rows() == 4);
  CHECK(p(3, 3) == 1.0);
  CHECK(p.topLeftCorner(3, 3) == a);
  auto d = decompose_sliced(p);
  auto back = from_json(to_json(d));
  CHECK(same_terms(d, back, 0.0));
  CHECK(to_json(d)[0].contains("coeff_re"));
}
