#include <doctest.h>

#include <cstar/algebras.hpp>
#include <cstar/hardy.hpp>
#include <cstar/random.hpp>

#include "helpers.hpp"

using namespace cstar;
using namespace testing;

namespace {

CMatrix scalar(double re, double im = 0.0) {
  CMatrix out(1, 1);
  out(0, 0) = Complex(re, im);
  return out;
}

// Symbol |p(e^{i theta})|^2 for a scalar polynomial p with given coefficients.
TrigSymbol autocorrelation_symbol(const std::vector<Complex>& p,
                                  const NumericContext& ctx = {}) {
  std::vector<CMatrix> coeffs;
  Index d = static_cast<Index>(p.size()) - 1;
  for (Index k = 0; k <= d; ++k) {
    Complex c = 0.0;
    for (Index j = 0; j + k <= d; ++j)
      c += std::conj(p[static_cast<size_t>(j)]) * p[static_cast<size_t>(j + k)];
    coeffs.push_back(scalar(c.real(), c.imag()));
  }
  return make_trig_symbol(std::move(coeffs), ctx);
}

// Random polynomial with all roots of modulus >= min_modulus, normalized so
// the constant coefficient is positive.
std::vector<Complex> random_outer_poly(Rng& rng, Index degree, double min_modulus) {
  std::vector<Complex> coeffs{1.0};
  for (Index k = 0; k < degree; ++k) {
    double radius = min_modulus + rng.uniform(0.0, 1.5);
    Complex root = std::polar(radius, rng.uniform(0.0, 2.0 * 3.14159265358979));
    // multiply by (1 - z / root)
    std::vector<Complex> next(coeffs.size() + 1, 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i];
      next[i + 1] -= coeffs[i] / root;
    }
    coeffs = std::move(next);
  }
  Complex lead = coeffs[0];
  for (Complex& c : coeffs) c *= std::conj(lead) / std::abs(lead);
  double scale = rng.uniform(0.5, 2.0);
  for (Complex& c : coeffs) c *= scale;
  return coeffs;
}

}  // namespace

TEST_CASE("symbols validate positivity and symmetry") {
  TrigSymbol constant = make_trig_symbol({scalar(1.0)});
  CHECK(constant.degree == 0);
  CHECK(symbol_min_eigenvalue(constant, 64) == doctest::Approx(1.0));

  // 1 + 2cos(theta) dips below zero
  CHECK_THROWS_AS((void)make_trig_symbol({scalar(1.0), scalar(1.0)}), Error);
  try {
    (void)make_trig_symbol({scalar(1.0), scalar(1.0)});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SymbolNotPositive);
  }

  CHECK_THROWS_AS((void)make_trig_symbol({cmat(2, 2, {1, 1, 0, 1})}), Error);
}

TEST_CASE("toeplitz truncation layouts") {
  TrigSymbol one = make_trig_symbol({scalar(1.0)});
  CHECK_CLOSE(toeplitz_truncate(one, 4), CMatrix::Identity(4, 4), 1e-14);

  TrigSymbol sym = make_trig_symbol({scalar(5.0), scalar(2.0)});
  CMatrix t = toeplitz_truncate(sym, 3);
  CHECK_CLOSE(t, cmat(3, 3, {5, 2, 0, 2, 5, 2, 0, 2, 5}), 1e-14);
  CHECK_THROWS_AS((void)toeplitz_truncate(sym, 1), Error);

  TrigSymbol block = make_trig_symbol({CMatrix::Identity(2, 2)});
  CHECK_CLOSE(toeplitz_truncate(block, 3), CMatrix::Identity(6, 6), 1e-14);
}

TEST_CASE("truncations of certified symbols stay positive definite") {
  Rng rng(97);
  std::vector<Complex> p = random_outer_poly(rng, 3, 1.3);
  TrigSymbol sym = autocorrelation_symbol(p);
  for (Index n : {sym.degree + 1, Index{8}, Index{17}}) {
    CMatrix t = toeplitz_truncate(sym, n);
    CHECK(min_eigenvalue(t) > 0.0);
  }
}

TEST_CASE("szego factorization of 5 + 4cos") {
  TrigSymbol sym = make_trig_symbol({scalar(5.0), scalar(2.0)});
  OuterFactor outer = szego_factor(sym, 128, 1e-6);
  REQUIRE(outer.coeffs.size() == 2);
  CHECK(std::abs(outer.coeffs[0](0, 0) - 2.0) <= 1e-6);
  CHECK(std::abs(outer.coeffs[1](0, 0) - 1.0) <= 1e-6);
  CHECK(outer.autocorrelation_residual <= 1e-6);

  TrigSymbol nine = make_trig_symbol({scalar(9.0)});
  OuterFactor root = szego_factor(nine, 16, 1e-10);
  CHECK(std::abs(root.coeffs[0](0, 0) - 3.0) <= 1e-10);
}

TEST_CASE("szego roundtrip recovers random outer polynomials") {
  Rng rng(101);
  for (int trial = 0; trial < 6; ++trial) {
    Index degree = rng.uniform_index(1, 6);
    std::vector<Complex> p = random_outer_poly(rng, degree, 1.2);
    TrigSymbol sym = autocorrelation_symbol(p);
    OuterFactor outer = szego_factor(sym, 256, 1e-6);
    REQUIRE(static_cast<Index>(outer.coeffs.size()) == degree + 1);
    for (Index k = 0; k <= degree; ++k)
      CHECK(std::abs(outer.coeffs[static_cast<size_t>(k)](0, 0) -
                     p[static_cast<size_t>(k)]) <= 1e-6);

    std::vector<Complex> roots;
    for (const Complex& r : scalar_polynomial_roots(outer.coeffs))
      CHECK(std::abs(r) > 1.0 - 1e-6);
  }
}

TEST_CASE("szego handles block symbols") {
  Rng rng(103);
  // random analytic block polynomial with dominant constant term
  std::vector<CMatrix> a;
  a.push_back(3.0 * CMatrix::Identity(2, 2) + 0.3 * rng.hermitian(2));
  for (Index k = 0; k < 3; ++k) a.push_back(0.4 * rng.ginibre(2, 2));
  TrigSymbol sym = make_trig_symbol(outer_autocorrelation(a));
  OuterFactor outer = szego_factor(sym, 192, 1e-6);
  CHECK(outer.autocorrelation_residual <= 1e-6);
  std::vector<CMatrix> recon = outer_autocorrelation(outer.coeffs);
  for (size_t k = 0; k < recon.size(); ++k)
    CHECK((recon[k] - sym.coeffs[k]).norm() <= 1e-6);
  // leading coefficient is positive definite
  CHECK(min_eigenvalue(CMatrix(0.5 * (outer.coeffs[0] + outer.coeffs[0].adjoint()))) >
        0.0);
}

TEST_CASE("szego reports drift when the order is too small") {
  // roots close to the circle converge slowly
  std::vector<Complex> p{1.0, -0.99};
  TrigSymbol sym = autocorrelation_symbol(p);
  CHECK_THROWS_AS((void)szego_factor(sym, 8, 1e-12), Error);
}

TEST_CASE("subdiagonal factorization on diagonal input") {
  SubdiagonalReport report = subdiagonal_demo(CMatrix::Identity(3, 3));
  CHECK_CLOSE(report.z, CMatrix::Identity(3, 3), 1e-12);

  SubdiagonalReport diag = subdiagonal_demo(cdiag({1, 4}));
  CHECK_CLOSE(diag.z, cdiag({1, 2}), 1e-12);
  CHECK(diag.factorization_residual <= 1e-12);
}

TEST_CASE("subdiagonal demo identities on random positive input") {
  Rng rng(107);
  CMatrix x = rng.positive_definite(8, 100.0);
  SubdiagonalReport report = subdiagonal_demo(x);
  CHECK(report.factorization_residual <= 1e-9);
  CHECK(report.right_mult_residual <= 1e-9);
  CHECK(report.invariance_residual <= 1e-9);
  CHECK(report.compression_residual <= 1e-9);
  CHECK(report.compression_min_singular > 1e-6);

  // z is upper triangular with positive diagonal
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < i; ++j) CHECK(std::abs(report.z(i, j)) <= 1e-12);
    CHECK(report.z(i, i).real() > 0.0);
    CHECK(std::abs(report.z(i, i).imag()) <= 1e-12);
  }

  CHECK_THROWS_AS((void)subdiagonal_demo(cdiag({1, 0})), Error);
}

TEST_CASE("subdiagonal factor matches the reversed-chain factorization") {
  Rng rng(109);
  CMatrix x = rng.positive_definite(6, 50.0);
  SubdiagonalReport report = subdiagonal_demo(x);

  std::vector<Subspace> members;
  for (Index d = 1; d < 6; ++d) {
    CMatrix basis = CMatrix::Zero(6, d);
    for (Index j = 0; j < d; ++j) basis(5 - j, j) = 1.0;
    members.push_back(Subspace{6, basis});
  }
  Nest reversed = make_nest(6, members);
  CMatrix s = nest_cholesky(x, reversed);
  CHECK_CLOSE(CMatrix(s.adjoint()), report.z, 1e-9);
}

TEST_CASE("hardy compression map is unital and Toeplitz") {
  UcpMap phi = hardy_compression_map(1, 2);
  CHECK(phi.out_dim == 2);
  Index samples = phi.algebra.num_blocks();
  CHECK(samples == 3);

  AlgebraElement one = algebra_identity(phi.algebra);
  CHECK_CLOSE(apply(phi, one), CMatrix::Identity(2, 2), 1e-12);

  AlgebraElement cosine = algebra_zero(phi.algebra);
  for (Index m = 0; m < samples; ++m)
    cosine.blocks[static_cast<size_t>(m)](0, 0) =
        std::cos(2.0 * 3.14159265358979 * m / samples);
  CHECK_CLOSE(apply(phi, cosine), cmat(2, 2, {0, 0.5, 0.5, 0}), 1e-12);

  UcpMap bigger = hardy_compression_map(2, 6);
  CHECK_CLOSE(apply(bigger, algebra_identity(bigger.algebra)),
              CMatrix::Identity(6, 6), 1e-12);
  CHECK_THROWS_AS((void)hardy_compression_map(3, 3), Error);
}

TEST_CASE("hardy compression of the coordinate function is a truncated shift") {
  UcpMap phi = hardy_compression_map(1, 4);
  Index samples = phi.algebra.num_blocks();
  AlgebraElement coord = algebra_zero(phi.algebra);
  for (Index m = 0; m < samples; ++m)
    coord.blocks[static_cast<size_t>(m)](0, 0) =
        std::polar(1.0, 2.0 * 3.14159265358979 * m / samples);
  CMatrix t = apply(phi, coord);
  // multiplication by the coordinate shifts modes up: ones where i - j = 1
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      Complex expected = (i - j == 1) ? 1.0 : 0.0;
      CHECK(std::abs(t(i, j) - expected) <= 1e-12);
    }
}
