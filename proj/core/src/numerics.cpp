#include "cstar/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace cstar {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidContext: return "InvalidContext";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::NotUnital: return "NotUnital";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::EmptyRepresentation: return "EmptyRepresentation";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::NestMismatch: return "NestMismatch";
    case ErrorCode::NotDominated: return "NotDominated";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::SingularCompression: return "SingularCompression";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::NonMinimal: return "NonMinimal";
    case ErrorCode::BlockMismatch: return "BlockMismatch";
    case ErrorCode::NotMultiplicityFree: return "NotMultiplicityFree";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::SymbolNotPositive: return "SymbolNotPositive";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::AnchorNotCertified: return "AnchorNotCertified";
    case ErrorCode::EmptyComponentList: return "EmptyComponentList";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "UnknownError";
}

CMatrix Subspace::projector() const {
  if (basis.cols() == 0) return CMatrix::Zero(ambient_dim, ambient_dim);
  return basis * basis.adjoint();
}

bool all_finite(const CMatrix& a) {
  return a.allFinite();
}

namespace {

// Rank against the largest singular value, with the comparison scale floored
// at one so matrices that are numerically zero (projector defects and the
// like) have rank zero instead of spurious full rank.
Index rank_by_cutoff(const Eigen::VectorXd& sv, double eps_rank) {
  if (sv.size() == 0) return 0;
  double cutoff = eps_rank * std::max(sv(0), 1.0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

}  // namespace

double rel_residual(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / (1.0 + b.norm());
}

bool approx_equal(const CMatrix& a, const CMatrix& b, double eps) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return rel_residual(a, b) <= eps;
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
}

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.adjoint() * b).trace();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector vec(const CMatrix& a) {
  return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    raise(ErrorCode::ShapeMismatch, "unvec: size does not match target shape");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a, const NumericContext& ctx) {
  if (a.rows() != a.cols())
    raise(ErrorCode::ShapeMismatch, "hermitian_eigenvalues: matrix not square");
  if (!approx_equal(a, a.adjoint().eval(), ctx.eps_eq))
    raise(ErrorCode::NotPSD, "matrix is not Hermitian within eps_eq");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const CMatrix& a, const NumericContext& ctx) {
  return hermitian_eigenvalues(a, ctx).minCoeff();
}

bool is_positive_invertible(const CMatrix& a, const NumericContext& ctx) {
  Eigen::VectorXd ev = hermitian_eigenvalues(a, ctx);
  double scale = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  return ev.minCoeff() > ctx.eps_eq * scale;
}

PolarParts polar_decompose(const CMatrix& a, const NumericContext& ctx) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Index rank = rank_by_cutoff(svd.singularValues(), ctx.eps_rank);

  CMatrix v = svd.matrixV();
  PolarParts parts;
  parts.positive = v * svd.singularValues().asDiagonal() * v.adjoint();
  parts.partial_isometry =
      svd.matrixU().leftCols(rank) * v.leftCols(rank).adjoint();
  return parts;
}

CMatrix psd_sqrt(const CMatrix& a, const NumericContext& ctx) {
  if (a.rows() != a.cols())
    raise(ErrorCode::ShapeMismatch, "psd_sqrt: matrix not square");
  if (!approx_equal(a, a.adjoint().eval(), ctx.eps_eq))
    raise(ErrorCode::NotPSD, "psd_sqrt: matrix is not Hermitian within eps_eq");
  CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  // Scale floored at one so matrices that are numerically zero clip cleanly.
  double norm = std::max(
      {std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()), 1.0});
  Eigen::VectorXd root(ev.size());
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -ctx.eps_eq * norm)
      raise(ErrorCode::NotPSD, "psd_sqrt: eigenvalue below -eps_eq * norm");
    root(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

Subspace range_basis(const CMatrix& a, const NumericContext& ctx) {
  Subspace s;
  s.ambient_dim = a.rows();
  if (a.size() == 0 || a.norm() == 0.0) {
    s.basis = CMatrix::Zero(a.rows(), 0);
    return s;
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  Index rank = rank_by_cutoff(svd.singularValues(), ctx.eps_rank);
  s.basis = svd.matrixU().leftCols(rank);
  return s;
}

Subspace null_basis(const CMatrix& a, const NumericContext& ctx) {
  Subspace s;
  s.ambient_dim = a.cols();
  if (a.size() == 0 || a.norm() == 0.0) {
    s.basis = CMatrix::Identity(a.cols(), a.cols());
    return s;
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  Index rank = rank_by_cutoff(svd.singularValues(), ctx.eps_rank);
  s.basis = svd.matrixV().rightCols(a.cols() - rank);
  return s;
}

Subspace span_of_columns(const CMatrix& columns, const NumericContext& ctx) {
  return range_basis(columns, ctx);
}

namespace {

bool contained_in(const Subspace& e, const Subspace& f, double eps) {
  if (e.dim() == 0) return true;
  if (e.dim() > f.dim()) return false;
  CMatrix resid = e.basis - f.projector() * e.basis;
  return resid.norm() <= eps * std::sqrt(static_cast<double>(e.dim()));
}

}  // namespace

SubspaceOrder subspace_compare(const Subspace& e, const Subspace& f,
                               const NumericContext& ctx) {
  if (e.ambient_dim != f.ambient_dim)
    raise(ErrorCode::DimensionMismatch, "subspace_compare: ambient dims differ");
  bool ef = contained_in(e, f, ctx.eps_eq);
  bool fe = contained_in(f, e, ctx.eps_eq);
  if (ef && fe) return SubspaceOrder::Equal;
  if (ef) return SubspaceOrder::ProperSub;
  if (fe) return SubspaceOrder::ProperSup;
  return SubspaceOrder::Incomparable;
}

Subspace subspace_join(const Subspace& e, const Subspace& f,
                       const NumericContext& ctx) {
  if (e.ambient_dim != f.ambient_dim)
    raise(ErrorCode::DimensionMismatch, "subspace_join: ambient dims differ");
  CMatrix stacked(e.ambient_dim, e.dim() + f.dim());
  stacked << e.basis, f.basis;
  Subspace out = span_of_columns(stacked, ctx);
  out.ambient_dim = e.ambient_dim;
  return out;
}

Subspace subspace_meet(const Subspace& e, const Subspace& f,
                       const NumericContext& ctx) {
  if (e.ambient_dim != f.ambient_dim)
    raise(ErrorCode::DimensionMismatch, "subspace_meet: ambient dims differ");
  // x in E ^ F iff (I - P_E) x = 0 and (I - P_F) x = 0.
  Index n = e.ambient_dim;
  CMatrix stacked(2 * n, n);
  stacked.topRows(n) = CMatrix::Identity(n, n) - e.projector();
  stacked.bottomRows(n) = CMatrix::Identity(n, n) - f.projector();
  Subspace out = null_basis(stacked, ctx);
  out.ambient_dim = n;
  return out;
}

Subspace full_space(Index ambient_dim) {
  return Subspace{ambient_dim, CMatrix::Identity(ambient_dim, ambient_dim)};
}

Subspace zero_space(Index ambient_dim) {
  return Subspace{ambient_dim, CMatrix::Zero(ambient_dim, 0)};
}

std::vector<CMatrix> matrix_kernel_basis(const CMatrix& op, Index x_rows,
                                         Index x_cols, const NumericContext& ctx) {
  Subspace null = null_basis(op, ctx);
  std::vector<CMatrix> basis;
  basis.reserve(null.dim());
  for (Index j = 0; j < null.dim(); ++j)
    basis.push_back(unvec(null.basis.col(j), x_rows, x_cols));
  return basis;
}

std::vector<CMatrix> solve_linear_subspace(
    const std::vector<std::pair<CMatrix, CMatrix>>& constraints,
    Index x_rows, Index x_cols, const NumericContext& ctx) {
  const Index dim = x_rows * x_cols;
  if (constraints.empty()) {
    std::vector<CMatrix> basis;
    basis.reserve(dim);
    for (Index j = 0; j < x_cols; ++j)
      for (Index i = 0; i < x_rows; ++i) {
        CMatrix e = CMatrix::Zero(x_rows, x_cols);
        e(i, j) = 1.0;
        basis.push_back(e);
      }
    return basis;
  }

  CMatrix id_cols = CMatrix::Identity(x_cols, x_cols);
  CMatrix id_rows = CMatrix::Identity(x_rows, x_rows);
  CMatrix op(static_cast<Index>(constraints.size()) * dim, dim);
  Index row = 0;
  for (const auto& [a, b] : constraints) {
    if (a.rows() != x_rows || a.cols() != x_rows)
      raise(ErrorCode::ShapeMismatch, "solve_linear_subspace: A_k not x_rows-square");
    if (b.rows() != x_cols || b.cols() != x_cols)
      raise(ErrorCode::ShapeMismatch, "solve_linear_subspace: B_k not x_cols-square");
    // A X - X B = 0  <=>  (I (x) A - B^T (x) I) vec(X) = 0
    op.middleRows(row, dim) = kron(id_cols, a) - kron(b.transpose(), id_rows);
    row += dim;
  }
  return matrix_kernel_basis(op, x_rows, x_cols, ctx);
}

}  // namespace cstar
