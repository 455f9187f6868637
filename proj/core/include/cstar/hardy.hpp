#pragma once

#include <vector>

#include "cstar/cpmaps.hpp"

namespace cstar {

/// Matrix-valued trigonometric polynomial sum_{|k| <= d} c_k e^{ik theta}
/// with c_{-k} = c_k^*; only c_0..c_d are stored. block is the coefficient
/// size (1 for scalar symbols). Construction certifies strict positivity on
/// a grid of ctx.grid_size circle samples.
struct TrigSymbol {
  Index block = 1;
  Index degree = 0;
  std::vector<CMatrix> coeffs;  // c_0 .. c_degree

  CMatrix eval(double theta) const;
};

TrigSymbol make_trig_symbol(std::vector<CMatrix> coeffs, const NumericContext& ctx = {});

/// Smallest eigenvalue of the symbol over the sample grid.
double symbol_min_eigenvalue(const TrigSymbol& sym, int grid_size);

/// N x N block Toeplitz truncation T[i][j] = c_{i-j}; requires N >= d + 1.
CMatrix toeplitz_truncate(const TrigSymbol& sym, Index n, const NumericContext& ctx = {});

/// Analytic factor a_0 + a_1 z + ... + a_d z^d with positive(-definite) a_0;
/// its autocorrelation sum_j a_j^* a_{j+k} reproduces the symbol.
struct OuterFactor {
  Index block = 1;
  Index degree = 0;
  std::vector<CMatrix> coeffs;
  double drift = 0.0;               // stationarity defect of the factor rows
  double autocorrelation_residual = 0.0;
};

/// Spectral factorization by triangular factorization of the Toeplitz
/// truncation along the coordinate chain; the deepest full band row yields
/// the factor. NotConverged carries the measured row drift.
OuterFactor szego_factor(const TrigSymbol& sym, Index n, double tol,
                         const NumericContext& ctx = {});

/// c_k = sum_j a_j^* a_{j+k} for k = 0..d.
std::vector<CMatrix> outer_autocorrelation(const std::vector<CMatrix>& coeffs);

/// Roots of the scalar polynomial sum a_k z^k (companion-matrix eigenvalues).
std::vector<Complex> scalar_polynomial_roots(const std::vector<CMatrix>& coeffs);

/// Matrix of right multiplication y -> y x on the column-major flattening.
CMatrix right_multiplication_operator(const CMatrix& x);
/// Matrix of left multiplication y -> x y on the column-major flattening.
CMatrix left_multiplication_operator(const CMatrix& x);

struct SubdiagonalReport {
  CMatrix z;  // upper triangular, positive diagonal, x = z z^*
  double factorization_residual = 0.0;    // || x - z z^* ||
  double right_mult_residual = 0.0;       // || R_x - R_z^* R_z || on the HS space
  double invariance_residual = 0.0;       // || (1-P) R_z P || for P onto uppers
  double compression_residual = 0.0;      // compression of R_x vs product form
  double compression_min_singular = 0.0;  // invertibility of R_z on the uppers
};

/// Trace-algebra realization: upper-triangular factorization of x inside M_n
/// and the induced identities for right multiplication on the HS space, with
/// the compression to the upper-triangular subspace.
SubdiagonalReport subdiagonal_demo(const CMatrix& x, const NumericContext& ctx = {});

/// Compression of multiplication by trig polynomials of degree <= d to the
/// first n Fourier modes, presented as a UCP map over the commutative algebra
/// of functions on n + d roots of unity.
UcpMap hardy_compression_map(Index degree, Index n, const NumericContext& ctx = {});

}  // namespace cstar
