#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cstar/context.hpp"
#include "cstar/errors.hpp"

namespace cstar {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// A subspace stored as an orthonormal basis (ambient_dim x dim isometry).
/// Projections are derived on demand as basis * basis^*.
struct Subspace {
  Index ambient_dim = 0;
  CMatrix basis;  // orthonormal columns; may have zero columns

  Index dim() const { return basis.cols(); }
  CMatrix projector() const;
};

enum class SubspaceOrder { Equal, ProperSub, ProperSup, Incomparable };

struct PolarParts {
  CMatrix partial_isometry;  // U, initial space = closure of ran(P)
  CMatrix positive;          // P = (A^* A)^{1/2}
};

// --- scalar/matrix helpers -------------------------------------------------

bool all_finite(const CMatrix& a);

/// Relative Frobenius residual ||a - b||_F / (1 + ||b||_F).
double rel_residual(const CMatrix& a, const CMatrix& b);

/// rel_residual(a, b) <= eps.
bool approx_equal(const CMatrix& a, const CMatrix& b, double eps);

/// Largest singular value.
double operator_norm(const CMatrix& a);

/// Hilbert-Schmidt inner product tr(a^* b).
Complex hs_inner(const CMatrix& a, const CMatrix& b);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Column-major flattening, consistent with kron via vec(AXB) = (B^T (x) A) vec(X).
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, Index rows, Index cols);

/// Eigenvalues of a Hermitian matrix, ascending. Rejects non-Hermitian input.
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a, const NumericContext& ctx = {});

/// Smallest/largest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& a, const NumericContext& ctx = {});

/// True when min eigenvalue > eps_eq * ||a|| (spectral scale).
bool is_positive_invertible(const CMatrix& a, const NumericContext& ctx = {});

// --- spec operations --------------------------------------------------------

/// A = U P with P = (A^* A)^{1/2} and U a partial isometry whose initial
/// space is the closure of ran(P); rank decided by eps_rank.
PolarParts polar_decompose(const CMatrix& a, const NumericContext& ctx = {});

/// Positive square root of a PSD matrix. Eigenvalues in
/// [-eps_eq*||a||, 0] are clipped to zero; below that, NotPSD.
CMatrix psd_sqrt(const CMatrix& a, const NumericContext& ctx = {});

Subspace range_basis(const CMatrix& a, const NumericContext& ctx = {});
Subspace null_basis(const CMatrix& a, const NumericContext& ctx = {});

/// Build a subspace from a (not necessarily orthonormal) spanning set.
Subspace span_of_columns(const CMatrix& columns, const NumericContext& ctx = {});

SubspaceOrder subspace_compare(const Subspace& e, const Subspace& f,
                               const NumericContext& ctx = {});

Subspace subspace_join(const Subspace& e, const Subspace& f,
                       const NumericContext& ctx = {});
Subspace subspace_meet(const Subspace& e, const Subspace& f,
                       const NumericContext& ctx = {});
Subspace full_space(Index ambient_dim);
Subspace zero_space(Index ambient_dim);

/// HS-orthonormal basis of { X : A_k X = X B_k for every constraint pair }.
/// All A_k must be x_rows-square and all B_k x_cols-square.
std::vector<CMatrix> solve_linear_subspace(
    const std::vector<std::pair<CMatrix, CMatrix>>& constraints,
    Index x_rows, Index x_cols, const NumericContext& ctx = {});

/// Null space (as HS-orthonormal matrices) of a general linear operator on
/// matrices given by its action columns: op * vec(X) = 0.
std::vector<CMatrix> matrix_kernel_basis(const CMatrix& op, Index x_rows,
                                         Index x_cols, const NumericContext& ctx = {});

}  // namespace cstar
