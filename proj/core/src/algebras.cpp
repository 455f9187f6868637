#include "cstar/algebras.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace cstar {

void FiniteCStarAlgebra::validate() const {
  if (block_dims.empty())
    raise(ErrorCode::ShapeMismatch, "algebra needs at least one block");
  for (Index n : block_dims)
    if (n < 1) raise(ErrorCode::ShapeMismatch, "block dimensions must be >= 1");
}

void AlgebraElement::validate() const {
  algebra.validate();
  if (static_cast<Index>(blocks.size()) != algebra.num_blocks())
    raise(ErrorCode::ShapeMismatch, "element block count does not match algebra");
  for (Index b = 0; b < algebra.num_blocks(); ++b) {
    const CMatrix& x = blocks[static_cast<size_t>(b)];
    if (x.rows() != algebra.block_dim(b) || x.cols() != algebra.block_dim(b))
      raise(ErrorCode::ShapeMismatch, "element block shape does not match algebra");
    if (!all_finite(x))
      raise(ErrorCode::ShapeMismatch, "element has non-finite entries");
  }
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement out{algebra, {}};
  out.blocks.reserve(blocks.size());
  for (const CMatrix& x : blocks) out.blocks.push_back(x.adjoint());
  return out;
}

AlgebraElement algebra_identity(const FiniteCStarAlgebra& algebra) {
  AlgebraElement out{algebra, {}};
  for (Index b = 0; b < algebra.num_blocks(); ++b)
    out.blocks.push_back(CMatrix::Identity(algebra.block_dim(b), algebra.block_dim(b)));
  return out;
}

AlgebraElement algebra_zero(const FiniteCStarAlgebra& algebra) {
  AlgebraElement out{algebra, {}};
  for (Index b = 0; b < algebra.num_blocks(); ++b)
    out.blocks.push_back(CMatrix::Zero(algebra.block_dim(b), algebra.block_dim(b)));
  return out;
}

std::vector<AlgebraElement> matrix_unit_generators(const FiniteCStarAlgebra& algebra) {
  algebra.validate();
  std::vector<AlgebraElement> gens;
  for (Index b = 0; b < algebra.num_blocks(); ++b) {
    Index n = algebra.block_dim(b);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        AlgebraElement g = algebra_zero(algebra);
        g.blocks[static_cast<size_t>(b)](i, j) = 1.0;
        gens.push_back(std::move(g));
      }
  }
  return gens;
}

Index Representation::block_offset(Index b) const {
  Index off = 0;
  for (Index i = 0; i < b; ++i) off += block_size(i);
  return off;
}

CMatrix Representation::apply(const AlgebraElement& a) const {
  if (!(a.algebra == algebra))
    raise(ErrorCode::AlgebraMismatch, "representation applied to foreign element");
  CMatrix out = CMatrix::Zero(total_dim, total_dim);
  Index off = 0;
  for (Index b = 0; b < algebra.num_blocks(); ++b) {
    Index m = multiplicities[static_cast<size_t>(b)];
    Index size = block_size(b);
    if (m > 0)
      out.block(off, off, size, size) =
          kron(a.blocks[static_cast<size_t>(b)], CMatrix::Identity(m, m));
    off += size;
  }
  return out;
}

CMatrix Representation::block_projector(Index b) const {
  CMatrix out = CMatrix::Zero(total_dim, total_dim);
  Index off = block_offset(b);
  Index size = block_size(b);
  out.block(off, off, size, size) = CMatrix::Identity(size, size);
  return out;
}

CMatrix Representation::embed_commutant(const std::vector<CMatrix>& k_blocks) const {
  if (static_cast<Index>(k_blocks.size()) != algebra.num_blocks())
    raise(ErrorCode::ShapeMismatch, "embed_commutant: wrong block count");
  CMatrix out = CMatrix::Zero(total_dim, total_dim);
  Index off = 0;
  for (Index b = 0; b < algebra.num_blocks(); ++b) {
    Index n = algebra.block_dim(b);
    Index m = multiplicities[static_cast<size_t>(b)];
    const CMatrix& t = k_blocks[static_cast<size_t>(b)];
    if (t.rows() != m || t.cols() != m)
      raise(ErrorCode::ShapeMismatch, "embed_commutant: K-side block has wrong size");
    if (m > 0)
      out.block(off, off, n * m, n * m) = kron(CMatrix::Identity(n, n), t);
    off += n * m;
  }
  return out;
}

std::vector<CMatrix> Representation::extract_commutant_blocks(const CMatrix& t) const {
  if (t.rows() != total_dim || t.cols() != total_dim)
    raise(ErrorCode::ShapeMismatch, "extract_commutant_blocks: wrong operator size");
  std::vector<CMatrix> out;
  Index off = 0;
  for (Index b = 0; b < algebra.num_blocks(); ++b) {
    Index n = algebra.block_dim(b);
    Index m = multiplicities[static_cast<size_t>(b)];
    CMatrix avg = CMatrix::Zero(m, m);
    for (Index i = 0; i < n; ++i)
      avg += t.block(off + i * m, off + i * m, m, m);
    if (n > 0) avg /= static_cast<double>(n);
    out.push_back(std::move(avg));
    off += n * m;
  }
  return out;
}

Representation rep_build(const FiniteCStarAlgebra& algebra,
                         const std::vector<Index>& multiplicities) {
  algebra.validate();
  if (static_cast<Index>(multiplicities.size()) != algebra.num_blocks())
    raise(ErrorCode::ShapeMismatch, "multiplicity count does not match block count");
  Index total = 0;
  for (Index b = 0; b < algebra.num_blocks(); ++b) {
    Index m = multiplicities[static_cast<size_t>(b)];
    if (m < 0) raise(ErrorCode::ShapeMismatch, "negative multiplicity");
    total += algebra.block_dim(b) * m;
  }
  if (total == 0)
    raise(ErrorCode::EmptyRepresentation, "all multiplicities are zero");
  return Representation{algebra, multiplicities, total};
}

CMatrix OperatorAlgebraSpan::project(const CMatrix& t) const {
  CMatrix out = CMatrix::Zero(ambient_dim, ambient_dim);
  for (const CMatrix& b : basis) out += hs_inner(b, t) * b;
  return out;
}

bool OperatorAlgebraSpan::contains(const CMatrix& t, const NumericContext& ctx) const {
  return approx_equal(project(t), t, ctx.eps_eq);
}

bool OperatorAlgebraSpan::closed_under_multiplication(const NumericContext& ctx) const {
  for (const CMatrix& a : basis)
    for (const CMatrix& b : basis)
      if (!contains(a * b, ctx)) return false;
  return true;
}

OperatorAlgebraSpan span_from_family(Index ambient_dim,
                                     const std::vector<CMatrix>& family,
                                     const NumericContext& ctx) {
  CMatrix stacked(ambient_dim * ambient_dim, static_cast<Index>(family.size()));
  for (size_t k = 0; k < family.size(); ++k) {
    if (family[k].rows() != ambient_dim || family[k].cols() != ambient_dim)
      raise(ErrorCode::ShapeMismatch, "span_from_family: wrong operator size");
    stacked.col(static_cast<Index>(k)) = vec(family[k]);
  }
  Subspace s = span_of_columns(stacked, ctx);
  OperatorAlgebraSpan out;
  out.ambient_dim = ambient_dim;
  for (Index j = 0; j < s.dim(); ++j)
    out.basis.push_back(unvec(s.basis.col(j), ambient_dim, ambient_dim));
  CMatrix id = CMatrix::Identity(ambient_dim, ambient_dim);
  out.unital = out.project(id).isApprox(id, 1e-8) ||
               approx_equal(out.project(id), id, ctx.eps_eq);
  return out;
}

OperatorAlgebraSpan commutant_basis(const Representation& rep,
                                    const NumericContext& ctx) {
  // The commutant of (+)_b (x_b (x) I_{m_b}) is (+)_b (I_{n_b} (x) M_{m_b});
  // assemble that basis directly and enforce the commutation relations as a
  // structural cross-check.
  std::vector<CMatrix> basis;
  for (Index b = 0; b < rep.algebra.num_blocks(); ++b) {
    Index n = rep.algebra.block_dim(b);
    Index m = rep.multiplicities[static_cast<size_t>(b)];
    double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) {
        std::vector<CMatrix> blocks;
        for (Index c = 0; c < rep.algebra.num_blocks(); ++c)
          blocks.push_back(CMatrix::Zero(
              rep.multiplicities[static_cast<size_t>(c)],
              rep.multiplicities[static_cast<size_t>(c)]));
        blocks[static_cast<size_t>(b)](i, j) = scale;
        basis.push_back(rep.embed_commutant(blocks));
      }
  }

  Index expected = 0;
  for (Index m : rep.multiplicities) expected += m * m;
  if (static_cast<Index>(basis.size()) != expected)
    raise(ErrorCode::StructureMismatch,
          "commutant dimension disagrees with sum of squared multiplicities");
  for (const AlgebraElement& g : matrix_unit_generators(rep.algebra)) {
    CMatrix pg = rep.apply(g);
    for (const CMatrix& x : basis)
      if (!approx_equal(CMatrix(x * pg), CMatrix(pg * x), ctx.eps_eq))
        raise(ErrorCode::StructureMismatch,
              "structural commutant element fails to commute");
  }

  OperatorAlgebraSpan out;
  out.ambient_dim = rep.total_dim;
  out.basis = std::move(basis);
  out.unital = true;
  return out;
}

Nest make_nest(Index ambient_dim, std::vector<Subspace> members,
               const NumericContext& ctx) {
  for (const Subspace& s : members)
    if (s.ambient_dim != ambient_dim)
      raise(ErrorCode::NestMismatch, "nest member has wrong ambient dimension");
  members.push_back(zero_space(ambient_dim));
  members.push_back(full_space(ambient_dim));
  std::stable_sort(members.begin(), members.end(),
                   [](const Subspace& a, const Subspace& b) { return a.dim() < b.dim(); });
  std::vector<Subspace> chain;
  for (const Subspace& s : members) {
    if (!chain.empty()) {
      SubspaceOrder cmp = subspace_compare(chain.back(), s, ctx);
      if (cmp == SubspaceOrder::Equal) continue;
      if (cmp != SubspaceOrder::ProperSub)
        raise(ErrorCode::Unsupported, "subspace family is not totally ordered");
    }
    chain.push_back(s);
  }
  return Nest{ambient_dim, std::move(chain)};
}

CMatrix nest_adapted_basis(const Nest& nest, const NumericContext& ctx) {
  Index n = nest.ambient_dim;
  CMatrix q(n, n);
  Index filled = 0;
  CMatrix prev_proj = CMatrix::Zero(n, n);
  for (Index k = 1; k < nest.length(); ++k) {
    const Subspace& e = nest.chain[static_cast<size_t>(k)];
    CMatrix gap_proj = e.projector() - prev_proj;
    Index gap_dim = e.dim() - nest.chain[static_cast<size_t>(k - 1)].dim();
    // Gram-Schmidt over projected coordinate vectors, original order first.
    Index got = 0;
    for (Index j = 0; j < n && got < gap_dim; ++j) {
      CVector v = gap_proj.col(j);
      for (Index c = 0; c < filled + got; ++c)
        v -= q.col(c).dot(v) * q.col(c);
      double norm = v.norm();
      if (norm > ctx.eps_rank) {
        q.col(filled + got) = v / norm;
        ++got;
      }
    }
    if (got != gap_dim)
      raise(ErrorCode::NumericalFailure, "nest-adapted basis construction collapsed");
    filled += gap_dim;
    prev_proj = e.projector();
  }
  return q;
}

OperatorAlgebraSpan alg_of_nest(const Nest& nest, const NumericContext& ctx) {
  Index n = nest.ambient_dim;
  // (I - P_E) T P_E = 0 for every member: rows (P_E^T (x) (I - P_E)) vec(T).
  std::vector<CMatrix> rows;
  for (const Subspace& e : nest.chain) {
    if (e.dim() == 0 || e.dim() == n) continue;
    CMatrix p = e.projector();
    rows.push_back(kron(p.transpose(), CMatrix::Identity(n, n) - p));
  }
  if (rows.empty()) {
    OperatorAlgebraSpan out = span_from_family(
        n, solve_linear_subspace({}, n, n, ctx), ctx);
    out.unital = true;
    return out;
  }
  CMatrix op(static_cast<Index>(rows.size()) * n * n, n * n);
  for (size_t k = 0; k < rows.size(); ++k)
    op.middleRows(static_cast<Index>(k) * n * n, n * n) = rows[k];
  OperatorAlgebraSpan out;
  out.ambient_dim = n;
  out.basis = matrix_kernel_basis(op, n, n, ctx);
  out.unital = true;
  return out;
}

namespace {

// Upper-triangular Cholesky factor R with positive diagonal, D = R^* R.
// Pivot scale is checked against eps_eq * ||D|| and aborts rather than
// regularizing, since near-singularity is meaningful to callers.
CMatrix upper_cholesky(const CMatrix& d, double pivot_floor) {
  Index n = d.rows();
  CMatrix r = CMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    Complex diag = d(j, j);
    for (Index k = 0; k < j; ++k) diag -= std::conj(r(k, j)) * r(k, j);
    double pivot = diag.real();
    if (pivot <= pivot_floor)
      raise(ErrorCode::NotPD, "pivot at or below eps_eq * ||D||");
    double rjj = std::sqrt(pivot);
    r(j, j) = rjj;
    for (Index c = j + 1; c < n; ++c) {
      Complex s = d(j, c);
      for (Index k = 0; k < j; ++k) s -= std::conj(r(k, j)) * r(k, c);
      r(j, c) = s / rjj;
    }
  }
  return r;
}

}  // namespace

CMatrix nest_cholesky(const CMatrix& d, const Nest& nest, const NumericContext& ctx) {
  if (d.rows() != d.cols())
    raise(ErrorCode::ShapeMismatch, "nest_cholesky: matrix not square");
  if (d.rows() != nest.ambient_dim)
    raise(ErrorCode::NestMismatch, "nest_cholesky: ambient dims differ");
  if (!approx_equal(d, d.adjoint().eval(), ctx.eps_eq))
    raise(ErrorCode::NotPD, "nest_cholesky: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (d + d.adjoint())),
                                            Eigen::EigenvaluesOnly);
  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  if (nest.length() <= 2)  // trivial chain: plain triangular factorization
    return upper_cholesky(d, ctx.eps_eq * scale);
  CMatrix q = nest_adapted_basis(nest, ctx);
  CMatrix adapted = q.adjoint() * d * q;
  CMatrix r = upper_cholesky(adapted, ctx.eps_eq * scale);
  return q * r * q.adjoint();
}

Subspace invariant_closure(const OperatorAlgebraSpan& m, const CVector& v,
                           const NumericContext& ctx) {
  Index n = m.ambient_dim;
  if (v.size() != n)
    raise(ErrorCode::DimensionMismatch, "invariant_closure: vector size mismatch");
  Subspace current = span_of_columns(v, ctx);
  current.ambient_dim = n;
  while (true) {
    CMatrix images(n, current.dim() * (m.dim() + 1));
    images.leftCols(current.dim()) = current.basis;
    Index col = current.dim();
    for (const CMatrix& b : m.basis) {
      images.middleCols(col, current.dim()) = b * current.basis;
      col += current.dim();
    }
    Subspace next = span_of_columns(images, ctx);
    next.ambient_dim = n;
    if (next.dim() == current.dim()) return current;
    current = std::move(next);
  }
}

NestExtraction lat_nest_extract(const OperatorAlgebraSpan& m,
                                const NumericContext& ctx) {
  Index n = m.ambient_dim;
  std::vector<Subspace> found;
  auto add_new = [&](Subspace s) {
    if (s.dim() == 0 || s.dim() == n) return;
    for (const Subspace& t : found)
      if (subspace_compare(s, t, ctx) == SubspaceOrder::Equal) return;
    found.push_back(std::move(s));
  };

  for (Index i = 0; i < n; ++i) {
    CVector v = CVector::Zero(n);
    v(i) = 1.0;
    add_new(invariant_closure(m, v, ctx));
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      CVector v = CVector::Zero(n);
      v(i) = 1.0;
      v(j) = 1.0;
      add_new(invariant_closure(m, v, ctx));
    }

  // Close under join/meet until stable. Joins/meets of invariant subspaces
  // stay invariant, so the family remains inside Lat(m).
  bool grew = true;
  while (grew) {
    grew = false;
    size_t count = found.size();
    for (size_t i = 0; i < count && !grew; ++i)
      for (size_t j = i + 1; j < count && !grew; ++j) {
        size_t before = found.size();
        add_new(subspace_join(found[i], found[j], ctx));
        add_new(subspace_meet(found[i], found[j], ctx));
        grew = found.size() != before;
      }
  }

  for (size_t i = 0; i < found.size(); ++i)
    for (size_t j = i + 1; j < found.size(); ++j)
      if (subspace_compare(found[i], found[j], ctx) == SubspaceOrder::Incomparable) {
        NestExtraction out;
        out.is_nest = false;
        out.witness = std::make_pair(found[i], found[j]);
        return out;
      }

  NestExtraction out;
  out.is_nest = true;
  out.nest = make_nest(n, found, ctx);
  return out;
}

ReflexivityReport is_reflexive_nest_algebra(const OperatorAlgebraSpan& m,
                                            const NumericContext& ctx) {
  ReflexivityReport report;
  report.span_dim = m.dim();
  report.extraction = lat_nest_extract(m, ctx);
  if (!report.extraction.is_nest) {
    report.reflexive = false;
    return report;
  }
  OperatorAlgebraSpan alg = alg_of_nest(*report.extraction.nest, ctx);
  report.nest_algebra_dim = alg.dim();
  bool equal = alg.dim() == m.dim();
  if (equal)
    for (const CMatrix& b : alg.basis)
      if (!m.contains(b, ctx)) {
        equal = false;
        break;
      }
  report.reflexive = equal;
  return report;
}

}  // namespace cstar
