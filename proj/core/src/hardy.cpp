#include "cstar/hardy.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cstar/algebras.hpp"

namespace cstar {

CMatrix TrigSymbol::eval(double theta) const {
  CMatrix out = coeffs[0];
  for (Index k = 1; k <= degree; ++k) {
    Complex phase = std::polar(1.0, k * theta);
    out += phase * coeffs[static_cast<size_t>(k)] +
           std::conj(phase) * coeffs[static_cast<size_t>(k)].adjoint();
  }
  return out;
}

double symbol_min_eigenvalue(const TrigSymbol& sym, int grid_size) {
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < grid_size; ++s) {
    double theta = 2.0 * std::numbers::pi * s / grid_size;
    CMatrix value = sym.eval(theta);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(
        CMatrix(0.5 * (value + value.adjoint())), Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  return worst;
}

TrigSymbol make_trig_symbol(std::vector<CMatrix> coeffs, const NumericContext& ctx) {
  ctx.validate();
  if (coeffs.empty())
    raise(ErrorCode::ShapeMismatch, "symbol needs at least the constant coefficient");
  Index block = coeffs[0].rows();
  if (block < 1 || coeffs[0].cols() != block)
    raise(ErrorCode::ShapeMismatch, "coefficients must be square blocks");
  for (const CMatrix& c : coeffs) {
    if (c.rows() != block || c.cols() != block)
      raise(ErrorCode::ShapeMismatch, "coefficient blocks differ in size");
    if (!all_finite(c))
      raise(ErrorCode::ShapeMismatch, "coefficient has non-finite entries");
  }
  if (!approx_equal(coeffs[0], coeffs[0].adjoint().eval(), ctx.eps_eq))
    raise(ErrorCode::ShapeMismatch, "constant coefficient must be Hermitian");

  TrigSymbol sym;
  sym.block = block;
  sym.degree = static_cast<Index>(coeffs.size()) - 1;
  sym.coeffs = std::move(coeffs);
  if (symbol_min_eigenvalue(sym, ctx.grid_size) <= ctx.eps_eq)
    raise(ErrorCode::SymbolNotPositive,
          "symbol is not strictly positive on the sample grid");
  return sym;
}

CMatrix toeplitz_truncate(const TrigSymbol& sym, Index n, const NumericContext& ctx) {
  (void)ctx;
  if (n < sym.degree + 1)
    raise(ErrorCode::DegreeTooLarge, "truncation order must exceed the degree");
  const Index b = sym.block;
  CMatrix out = CMatrix::Zero(n * b, n * b);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Index k = i - j;
      if (std::abs(k) > sym.degree) continue;
      out.block(i * b, j * b, b, b) =
          k >= 0 ? sym.coeffs[static_cast<size_t>(k)]
                 : sym.coeffs[static_cast<size_t>(-k)].adjoint();
    }
  return out;
}

std::vector<CMatrix> outer_autocorrelation(const std::vector<CMatrix>& coeffs) {
  std::vector<CMatrix> out;
  const Index d = static_cast<Index>(coeffs.size()) - 1;
  for (Index k = 0; k <= d; ++k) {
    CMatrix c = CMatrix::Zero(coeffs[0].rows(), coeffs[0].cols());
    for (Index j = 0; j + k <= d; ++j)
      c += coeffs[static_cast<size_t>(j)].adjoint() * coeffs[static_cast<size_t>(j + k)];
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Upper-triangular factor R with D = R^* R for a banded Hermitian matrix;
// the factor inherits the band, so work is O(n * band^2).
CMatrix banded_upper_cholesky(const CMatrix& d, Index band, double pivot_floor) {
  const Index n = d.rows();
  CMatrix r = CMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    Complex diag = d(j, j);
    for (Index k = std::max<Index>(0, j - band); k < j; ++k)
      diag -= std::conj(r(k, j)) * r(k, j);
    double pivot = diag.real();
    if (pivot <= pivot_floor)
      raise(ErrorCode::NotPD, "pivot at or below eps_eq * ||D||");
    double rjj = std::sqrt(pivot);
    r(j, j) = rjj;
    for (Index c = j + 1; c <= std::min(n - 1, j + band); ++c) {
      Complex s = d(j, c);
      for (Index k = std::max<Index>(0, c - band); k < j; ++k)
        s -= std::conj(r(k, j)) * r(k, c);
      r(j, c) = s / rjj;
    }
  }
  return r;
}

}  // namespace

OuterFactor szego_factor(const TrigSymbol& sym, Index n, double tol,
                         const NumericContext& ctx) {
  const Index d = sym.degree;
  const Index b = sym.block;
  if (n < 2 * d + 2 + 1)
    raise(ErrorCode::DegreeTooLarge,
          "truncation order too small to read a full factor row twice");

  // In the block-reversed layout the analytic factor is the upper Cholesky
  // factor, so its deep rows converge to the outer coefficients directly.
  CMatrix t(n * b, n * b);
  t.setZero();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Index k = j - i;
      if (std::abs(k) > d) continue;
      t.block(i * b, j * b, b, b) =
          k >= 0 ? sym.coeffs[static_cast<size_t>(k)]
                 : CMatrix(sym.coeffs[static_cast<size_t>(-k)].adjoint());
    }
  double scale = 0.0;
  for (const CMatrix& c : sym.coeffs) scale += 2.0 * operator_norm(c);
  CMatrix r = banded_upper_cholesky(t, (d + 1) * b - 1, ctx.eps_eq * scale);

  auto factor_at = [&](Index row) {
    std::vector<CMatrix> coeffs;
    for (Index k = 0; k <= d; ++k)
      coeffs.push_back(r.block(row * b, (row + k) * b, b, b));
    return coeffs;
  };

  const Index deep = n - 1 - d;
  const Index earlier = deep - std::max<Index>(d, 1);
  std::vector<CMatrix> a = factor_at(deep);
  std::vector<CMatrix> a_prev = factor_at(earlier);

  double drift = 0.0;
  for (size_t k = 0; k < a.size(); ++k)
    drift = std::max(drift, (a[k] - a_prev[k]).norm());
  if (drift > tol)
    raise(ErrorCode::NotConverged,
          "factor rows still drifting: " + std::to_string(drift));

  // Left-normalize by the polar unitary of a_0 so the leading block is
  // positive definite; autocorrelations are unchanged.
  if (b > 1) {
    PolarParts polar = polar_decompose(a[0], ctx);
    if (polar.partial_isometry.cols() == b) {
      CMatrix align = polar.partial_isometry.adjoint();
      for (CMatrix& coeff : a) coeff = align * coeff;
    }
  }

  std::vector<CMatrix> recon = outer_autocorrelation(a);
  double resid = 0.0;
  for (Index k = 0; k <= d; ++k)
    resid = std::max(resid, (recon[static_cast<size_t>(k)] -
                             sym.coeffs[static_cast<size_t>(k)]).norm());
  if (resid > tol)
    raise(ErrorCode::NotConverged,
          "autocorrelation of the factor misses the symbol: " + std::to_string(resid));

  OuterFactor out;
  out.block = b;
  out.degree = d;
  out.coeffs = std::move(a);
  out.drift = drift;
  out.autocorrelation_residual = resid;
  return out;
}

std::vector<Complex> scalar_polynomial_roots(const std::vector<CMatrix>& coeffs) {
  for (const CMatrix& c : coeffs)
    if (c.rows() != 1 || c.cols() != 1)
      raise(ErrorCode::ShapeMismatch, "root finding applies to scalar factors only");
  Index d = static_cast<Index>(coeffs.size()) - 1;
  while (d > 0 && std::abs(coeffs[static_cast<size_t>(d)](0, 0)) == 0.0) --d;
  if (d == 0) return {};
  CMatrix companion = CMatrix::Zero(d, d);
  Complex lead = coeffs[static_cast<size_t>(d)](0, 0);
  for (Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (Index i = 0; i < d; ++i)
    companion(i, d - 1) = -coeffs[static_cast<size_t>(i)](0, 0) / lead;
  Eigen::ComplexEigenSolver<CMatrix> es(companion);
  std::vector<Complex> roots;
  for (Index i = 0; i < d; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

CMatrix right_multiplication_operator(const CMatrix& x) {
  return kron(x.transpose(), CMatrix::Identity(x.rows(), x.rows()));
}

CMatrix left_multiplication_operator(const CMatrix& x) {
  return kron(CMatrix::Identity(x.cols(), x.cols()), x);
}

SubdiagonalReport subdiagonal_demo(const CMatrix& x, const NumericContext& ctx) {
  const Index n = x.rows();
  if (x.cols() != n) raise(ErrorCode::ShapeMismatch, "subdiagonal_demo: not square");
  if (!approx_equal(x, x.adjoint().eval(), ctx.eps_eq))
    raise(ErrorCode::NotPD, "subdiagonal_demo: matrix is not Hermitian");
  if (!is_positive_invertible(CMatrix(0.5 * (x + x.adjoint())), ctx))
    raise(ErrorCode::NotPD, "subdiagonal_demo: matrix is not positive definite");

  // x = z z^* with z upper triangular: reverse coordinates, take the lower
  // Cholesky factor, reverse back.
  CMatrix rev = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) rev(i, n - 1 - i) = 1.0;
  Eigen::LLT<CMatrix> llt(CMatrix(rev * x * rev));
  if (llt.info() != Eigen::Success)
    raise(ErrorCode::NotPD, "subdiagonal_demo: Cholesky breakdown");
  CMatrix z = rev * CMatrix(llt.matrixL()) * rev;

  SubdiagonalReport report;
  report.z = z;
  report.factorization_residual = rel_residual(CMatrix(z * z.adjoint()), x);

  CMatrix rx = right_multiplication_operator(x);
  CMatrix rz = right_multiplication_operator(z);
  report.right_mult_residual = rel_residual(CMatrix(rz.adjoint() * rz), rx);

  // Upper-triangular subspace of the HS space, orthonormal columns vec(E_ij).
  const Index hdim = n * (n + 1) / 2;
  CMatrix basis = CMatrix::Zero(n * n, hdim);
  Index col = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) {
      CMatrix unit = CMatrix::Zero(n, n);
      unit(i, j) = 1.0;
      basis.col(col++) = vec(unit);
    }
  CMatrix proj = basis * basis.adjoint();
  CMatrix id = CMatrix::Identity(n * n, n * n);
  report.invariance_residual =
      ((id - proj) * rz * proj).norm() / (1.0 + rz.norm());

  CMatrix compressed_rx = basis.adjoint() * rx * basis;
  CMatrix compressed_rz = basis.adjoint() * rz * basis;
  report.compression_residual = rel_residual(
      CMatrix(compressed_rz.adjoint() * compressed_rz), compressed_rx);
  report.compression_min_singular =
      Eigen::JacobiSVD<CMatrix>(compressed_rz).singularValues().minCoeff();
  return report;
}

UcpMap hardy_compression_map(Index degree, Index n, const NumericContext& ctx) {
  if (n <= degree)
    raise(ErrorCode::DegreeTooLarge, "need more modes than the degree bound");
  const Index samples = n + degree;
  FiniteCStarAlgebra algebra;
  algebra.block_dims.assign(static_cast<size_t>(samples), 1);

  std::vector<std::vector<CMatrix>> kraus(static_cast<size_t>(samples));
  const double scale = 1.0 / std::sqrt(static_cast<double>(samples));
  for (Index m = 0; m < samples; ++m) {
    CMatrix op(1, n);
    for (Index j = 0; j < n; ++j)
      op(0, j) = scale * std::polar(1.0, 2.0 * std::numbers::pi * m * j / samples);
    kraus[static_cast<size_t>(m)].push_back(std::move(op));
  }
  return ucp_from_kraus(algebra, n, std::move(kraus), ctx, true);
}

}  // namespace cstar
