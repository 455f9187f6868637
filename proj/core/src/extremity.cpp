#include "cstar/extremity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cstar/random.hpp"

namespace cstar {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Unsupported: return "unsupported";
  }
  return "unsupported";
}

PureSumSpec merge_summands(const PureSumSpec& spec, const NumericContext& ctx) {
  spec.algebra.validate();
  PureSumSpec merged{spec.algebra, {}};
  for (const PureSummand& s : spec.summands) {
    if (s.block < 0 || s.block >= spec.algebra.num_blocks())
      raise(ErrorCode::ShapeMismatch, "summand block index out of range");
    Index n = spec.algebra.block_dim(s.block);
    if (s.range_isometry.rows() != n || s.range_isometry.cols() < 1 ||
        s.range_isometry.cols() > n)
      raise(ErrorCode::ShapeMismatch, "summand isometry has wrong shape");
    CMatrix gram = s.range_isometry.adjoint() * s.range_isometry;
    if (!approx_equal(gram, CMatrix::Identity(gram.rows(), gram.cols()), ctx.eps_eq))
      raise(ErrorCode::NotIsometry, "summand isometry columns not orthonormal");
    if (s.multiplicity < 1)
      raise(ErrorCode::ShapeMismatch, "summand multiplicity must be >= 1");

    bool absorbed = false;
    for (PureSummand& t : merged.summands) {
      if (t.block != s.block || t.range_isometry.cols() != s.range_isometry.cols())
        continue;
      Subspace a{n, t.range_isometry};
      Subspace b{n, s.range_isometry};
      if (subspace_compare(a, b, ctx) == SubspaceOrder::Equal) {
        t.multiplicity += s.multiplicity;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.summands.push_back(s);
  }
  std::stable_sort(merged.summands.begin(), merged.summands.end(),
                   [](const PureSummand& a, const PureSummand& b) {
                     if (a.block != b.block) return a.block < b.block;
                     return a.range_isometry.cols() < b.range_isometry.cols();
                   });
  return merged;
}

UcpMap assemble_pure_sum(const PureSumSpec& spec, const NumericContext& ctx) {
  if (spec.summands.empty())
    raise(ErrorCode::ShapeMismatch, "pure sum needs at least one summand");
  Index out_dim = 0;
  for (const PureSummand& s : spec.summands)
    out_dim += s.range_isometry.cols() * s.multiplicity;

  std::vector<std::vector<CMatrix>> kraus(
      static_cast<size_t>(spec.algebra.num_blocks()));
  Index offset = 0;
  for (const PureSummand& s : spec.summands) {
    Index d = s.range_isometry.cols();
    Index k = s.multiplicity;
    Index n = spec.algebra.block_dim(s.block);
    // Summand space is C^d (x) C^k with index p * k + j.
    for (Index j = 0; j < k; ++j) {
      CMatrix op = CMatrix::Zero(n, out_dim);
      for (Index p = 0; p < d; ++p)
        op.col(offset + p * k + j) = s.range_isometry.col(p);
      kraus[static_cast<size_t>(s.block)].push_back(std::move(op));
    }
    offset += d * k;
  }
  return ucp_from_kraus(spec.algebra, out_dim, std::move(kraus), ctx, true);
}

namespace {

// Columns of the compression map T -> V^* T V over a commutant basis.
CMatrix compression_columns(const StinespringTriple& triple,
                            const OperatorAlgebraSpan& commutant) {
  const CMatrix& v = triple.isometry;
  const Index h = triple.map.out_dim;
  CMatrix cols(h * h, commutant.dim());
  for (Index k = 0; k < commutant.dim(); ++k)
    cols.col(k) = vec(CMatrix(v.adjoint() * commutant.basis[static_cast<size_t>(k)] * v));
  return cols;
}

}  // namespace

DecisionReport is_extreme(const UcpMap& phi, const NumericContext& ctx) {
  StinespringTriple triple = minimal_stinespring(phi, ctx);
  OperatorAlgebraSpan commutant = commutant_basis(triple.rep, ctx);
  CMatrix cols = compression_columns(triple, commutant);

  Eigen::JacobiSVD<CMatrix> svd(cols, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff =
      sv.size() > 0 ? ctx.eps_rank * std::max(sv(0), 1.0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;

  DecisionReport report;
  if (rank == commutant.dim()) {
    report.verdict = Verdict::True;
    report.notes = "compression of the commutant is injective";
    return report;
  }
  CVector null_coeff = svd.matrixV().col(cols.cols() - 1);
  CMatrix witness = CMatrix::Zero(triple.rep.total_dim, triple.rep.total_dim);
  for (Index k = 0; k < commutant.dim(); ++k)
    witness += null_coeff(k) * commutant.basis[static_cast<size_t>(k)];
  report.verdict = Verdict::False;
  report.kernel_witness = witness;
  report.notes = "nonzero commutant element compresses to zero";
  return report;
}

DecisionReport is_extreme_pure_sum(const PureSumSpec& spec, const NumericContext& ctx) {
  if (spec.summands.empty())
    raise(ErrorCode::ShapeMismatch, "pure sum needs at least one summand");
  Index block = spec.summands.front().block;
  for (const PureSummand& s : spec.summands)
    if (s.block != block)
      raise(ErrorCode::BlockMismatch,
            "summands must compress a single block for the pairwise test");

  DecisionReport report;
  report.verdict = Verdict::True;
  report.notes = "all pairwise range overlaps are nonzero";
  for (size_t i = 0; i < spec.summands.size() && report.verdict == Verdict::True; ++i)
    for (size_t j = i + 1; j < spec.summands.size(); ++j) {
      const CMatrix& vi = spec.summands[i].range_isometry;
      const CMatrix& vj = spec.summands[j].range_isometry;
      if ((vi.adjoint() * vj).norm() <= ctx.eps_eq) {
        report.verdict = Verdict::False;
        Index n = vi.rows();
        report.incomparable_witness =
            std::make_pair(Subspace{n, vi}, Subspace{n, vj});
        report.notes = "orthogonal pair of ranges";
        break;
      }
    }

  DecisionReport direct = is_extreme(assemble_pure_sum(spec, ctx), ctx);
  if (direct.verdict != report.verdict)
    raise(ErrorCode::NumericalFailure,
          "pairwise test disagrees with the rank test on the assembled map");
  return report;
}

namespace {

struct BlockSplit {
  std::vector<Subspace> block_ranges;  // inside each block, in block coordinates
  double residual = 0.0;
  bool ok = false;
};

// Intersect the dilated range with each block and check the pieces exhaust it.
BlockSplit split_range_by_block(const StinespringTriple& triple,
                                const NumericContext& ctx) {
  const Representation& rep = triple.rep;
  Subspace range{rep.total_dim, triple.isometry};
  BlockSplit split;
  Index covered = 0;
  CMatrix joint = CMatrix::Zero(rep.total_dim, rep.total_dim);
  for (Index b = 0; b < rep.algebra.num_blocks(); ++b) {
    Index size = rep.block_size(b);
    Index off = rep.block_offset(b);
    Subspace block{rep.total_dim, CMatrix::Zero(rep.total_dim, size)};
    block.basis.middleRows(off, size) = CMatrix::Identity(size, size);
    Subspace piece = subspace_meet(range, block, ctx);
    covered += piece.dim();
    joint += piece.projector();
    Subspace local{size, piece.basis.middleRows(off, size)};
    // Re-orthonormalize the block-local coordinates.
    local = span_of_columns(local.basis, ctx);
    local.ambient_dim = size;
    split.block_ranges.push_back(std::move(local));
  }
  split.residual = rel_residual(joint, range.projector());
  split.ok = covered == range.dim() && split.residual <= ctx.eps_eq;
  return split;
}

struct BlockDecomposition {
  bool ok = false;
  double residual = 0.0;
  std::vector<Subspace> g_parts;   // subspaces of C^n
  std::vector<CMatrix> k_parts;    // orthonormal bases in C^m
};

// Split a subspace H of C^n (x) C^k into (+) G_r (x) K_r with orthogonal K_r:
// compute the K-side operators commuting with P_H, take spectral projections
// of a generic Hermitian central element, and verify the reconstruction.
BlockDecomposition decompose_block(const Subspace& h, Index n, Index k,
                                   const NumericContext& ctx, Rng& rng) {
  BlockDecomposition out;
  CMatrix p = h.projector();
  CMatrix id_n = CMatrix::Identity(n, n);

  // { T : (I (x) T) P = P (I (x) T) }
  CMatrix commute_op(n * k * n * k, k * k);
  Index col = 0;
  for (Index jj = 0; jj < k; ++jj)
    for (Index ii = 0; ii < k; ++ii) {
      CMatrix unit = CMatrix::Zero(k, k);
      unit(ii, jj) = 1.0;
      CMatrix lifted = kron(id_n, unit);
      commute_op.col(col++) = vec(CMatrix(lifted * p - p * lifted));
    }
  std::vector<CMatrix> c_basis = matrix_kernel_basis(commute_op, k, k, ctx);
  if (c_basis.empty())
    raise(ErrorCode::NumericalFailure, "commuting algebra lost the identity");

  // Center of that algebra, in coefficient coordinates.
  CMatrix center_op(static_cast<Index>(c_basis.size()) * k * k,
                    static_cast<Index>(c_basis.size()));
  for (Index j = 0; j < static_cast<Index>(c_basis.size()); ++j) {
    Index row = 0;
    for (const CMatrix& c : c_basis) {
      center_op.col(j).segment(row, k * k) =
          vec(CMatrix(c_basis[static_cast<size_t>(j)] * c -
                      c * c_basis[static_cast<size_t>(j)]));
      row += k * k;
    }
  }
  Subspace center_coeff = null_basis(center_op, ctx);

  CMatrix generic = CMatrix::Zero(k, k);
  for (Index j = 0; j < center_coeff.dim(); ++j) {
    Complex weight(rng.gaussian(), rng.gaussian());
    for (Index i = 0; i < static_cast<Index>(c_basis.size()); ++i)
      generic += weight * center_coeff.basis(i, j) * c_basis[static_cast<size_t>(i)];
  }
  generic = 0.5 * (generic + generic.adjoint().eval());

  Eigen::SelfAdjointEigenSolver<CMatrix> es(generic);
  const auto& ev = es.eigenvalues();
  double spread = std::max(1.0, ev.cwiseAbs().maxCoeff());
  double gap = 1e-6 * spread;

  std::vector<std::pair<Index, Index>> clusters;  // [begin, end)
  Index begin = 0;
  for (Index i = 1; i <= k; ++i) {
    if (i == k || ev(i) - ev(i - 1) > gap) {
      clusters.emplace_back(begin, i);
      begin = i;
    }
  }

  CMatrix reconstruction = CMatrix::Zero(n * k, n * k);
  for (const auto& [lo, hi] : clusters) {
    CMatrix k_part = es.eigenvectors().middleCols(lo, hi - lo);
    CVector u = k_part.col(0);
    // G = { g : g (x) u lies in H }
    CMatrix embed(n * k, n);
    for (Index j = 0; j < n; ++j) {
      CVector gu = CVector::Zero(n * k);
      for (Index jj = 0; jj < k; ++jj) gu(j * k + jj) = u(jj);
      embed.col(j) = gu - p * gu;
    }
    Subspace g_part = null_basis(embed, ctx);
    out.g_parts.push_back(g_part);
    out.k_parts.push_back(k_part);
    if (g_part.dim() > 0)
      reconstruction += kron(g_part.projector(), CMatrix(k_part * k_part.adjoint()));
  }
  out.residual = rel_residual(reconstruction, p);
  out.ok = out.residual <= ctx.eps_eq;
  return out;
}

}  // namespace

PureDecomposition decompose_into_pures(const StinespringTriple& triple,
                                       const NumericContext& ctx) {
  PureDecomposition result;
  result.spec.algebra = triple.map.algebra;
  Rng rng(ctx.rng_seed ^ 0xc2b2ae3d27d4eb4full);

  BlockSplit split = split_range_by_block(triple, ctx);
  if (!split.ok) {
    result.decomposable = false;
    result.residual = std::max(split.residual, ctx.eps_eq * 2.0);
    return result;
  }

  double worst = split.residual;
  for (Index b = 0; b < triple.rep.algebra.num_blocks(); ++b) {
    const Subspace& local = split.block_ranges[static_cast<size_t>(b)];
    if (local.dim() == 0) continue;
    Index n = triple.rep.algebra.block_dim(b);
    Index m = triple.rep.multiplicities[static_cast<size_t>(b)];
    BlockDecomposition dec = decompose_block(local, n, m, ctx, rng);
    worst = std::max(worst, dec.residual);
    if (!dec.ok) {
      result.decomposable = false;
      result.residual = worst;
      return result;
    }
    for (size_t r = 0; r < dec.g_parts.size(); ++r) {
      if (dec.g_parts[r].dim() == 0) continue;
      PureSummand s;
      s.block = b;
      s.range_isometry = dec.g_parts[r].basis;
      s.multiplicity = dec.k_parts[r].cols();
      result.spec.summands.push_back(std::move(s));
      result.k_bases.push_back(dec.k_parts[r]);
    }
  }

  // Sort by block, then range dimension, keeping K bases aligned.
  std::vector<size_t> order(result.spec.summands.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const PureSummand& x = result.spec.summands[a];
    const PureSummand& y = result.spec.summands[b];
    if (x.block != y.block) return x.block < y.block;
    return x.range_isometry.cols() < y.range_isometry.cols();
  });
  PureSumSpec sorted{result.spec.algebra, {}};
  std::vector<CMatrix> sorted_k;
  for (size_t idx : order) {
    sorted.summands.push_back(result.spec.summands[idx]);
    sorted_k.push_back(result.k_bases[idx]);
  }
  result.spec = std::move(sorted);
  result.k_bases = std::move(sorted_k);
  result.decomposable = true;
  result.residual = worst;
  return result;
}

DecisionReport cstar_extreme_pure_sum(const PureSumSpec& raw, const NumericContext& ctx) {
  PureSumSpec spec = merge_summands(raw, ctx);
  DecisionReport report;
  report.decomposition = spec;

  for (size_t i = 0; i + 1 < spec.summands.size(); ++i) {
    const PureSummand& a = spec.summands[i];
    const PureSummand& b = spec.summands[i + 1];
    if (a.block != b.block) continue;  // disjoint summands, no constraint
    Index n = spec.algebra.block_dim(a.block);
    Subspace ra{n, a.range_isometry};
    Subspace rb{n, b.range_isometry};
    if (subspace_compare(ra, rb, ctx) != SubspaceOrder::ProperSub) {
      report.verdict = Verdict::False;
      report.incomparable_witness = std::make_pair(ra, rb);
      report.notes = "two ranges in one block are not nested";
      return report;
    }
  }
  report.verdict = Verdict::True;
  report.notes =
      "ranges form a chain within every block; finite chains are complete, "
      "so the countability condition holds vacuously";
  return report;
}

DecisionReport cstar_extreme(const UcpMap& phi, const NumericContext& ctx) {
  StinespringTriple triple = minimal_stinespring(phi, ctx);
  PureDecomposition dec = decompose_into_pures(triple, ctx);
  if (dec.decomposable) {
    DecisionReport report = cstar_extreme_pure_sum(dec.spec, ctx);
    return report;
  }
  DecisionReport report;
  report.residual = dec.residual;
  if (phi.algebra.num_blocks() == 1) {
    report.verdict = Verdict::False;
    report.notes = "map does not split into pure summands";
    return report;
  }
  bool mult_free = true;
  for (Index m : triple.rep.multiplicities)
    if (m > 1) mult_free = false;
  if (mult_free) {
    DecisionReport extreme = is_extreme(phi, ctx);
    if (extreme.verdict == Verdict::False) {
      report.verdict = Verdict::False;
      report.kernel_witness = extreme.kernel_witness;
      report.notes =
          "multiplicity-free map fails the linear extreme-point test";
      return report;
    }
  }
  report.verdict = Verdict::Unsupported;
  report.notes =
      "map is not a direct sum of pures; no decision procedure applies";
  return report;
}

DecisionReport cstar_extreme_normal(const CMatrix& v, Index g, Index k,
                                    const NumericContext& ctx) {
  if (v.rows() != g * k)
    raise(ErrorCode::ShapeMismatch, "isometry rows must equal g * k");
  const Index h = v.cols();
  if (!approx_equal(CMatrix(v.adjoint() * v), CMatrix::Identity(h, h), ctx.eps_eq))
    raise(ErrorCode::NotIsometry, "columns are not orthonormal");

  CMatrix p = v * v.adjoint();
  CMatrix k_trace = CMatrix::Zero(k, k);
  for (Index i = 0; i < g; ++i)
    k_trace += p.block(i * k, i * k, k, k);
  Subspace k_support = range_basis(k_trace, ctx);
  if (k_support.dim() != k)
    raise(ErrorCode::NonMinimal,
          "partial trace of the range projector is rank deficient");

  FiniteCStarAlgebra algebra{{g}};
  Representation rep = rep_build(algebra, {k});
  UcpMap map = ucp_from_dilation(rep, v, ctx, true);
  StinespringTriple triple{map, rep, v, true};

  PureDecomposition dec = decompose_into_pures(triple, ctx);
  DecisionReport report;
  if (!dec.decomposable) {
    report.verdict = Verdict::False;
    report.residual = dec.residual;
    report.notes = "range does not split into G (x) K summands";
  } else {
    report = cstar_extreme_pure_sum(dec.spec, ctx);
  }

  // Multiplicity-side invariance algebra and its reflexivity, as diagnostics.
  OperatorAlgebraSpan big = m_algebra(triple, ctx);
  std::vector<CMatrix> k_side;
  for (const CMatrix& t : big.basis)
    k_side.push_back(triple.rep.extract_commutant_blocks(t).front());
  OperatorAlgebraSpan m_span = span_from_family(k, k_side, ctx);
  report.m_reflexive = is_reflexive_nest_algebra(m_span, ctx).reflexive;
  return report;
}

OperatorAlgebraSpan m_algebra(const StinespringTriple& triple,
                              const NumericContext& ctx) {
  OperatorAlgebraSpan commutant = commutant_basis(triple.rep, ctx);
  const Index d = triple.rep.total_dim;
  CMatrix p = triple.isometry * triple.isometry.adjoint();
  CMatrix q = CMatrix::Identity(d, d) - p;

  CMatrix op(d * d, commutant.dim());
  for (Index kk = 0; kk < commutant.dim(); ++kk)
    op.col(kk) = vec(CMatrix(q * commutant.basis[static_cast<size_t>(kk)] * p));
  Subspace coeff = null_basis(op, ctx);

  OperatorAlgebraSpan out;
  out.ambient_dim = d;
  for (Index j = 0; j < coeff.dim(); ++j) {
    CMatrix t = CMatrix::Zero(d, d);
    for (Index kk = 0; kk < commutant.dim(); ++kk)
      t += coeff.basis(kk, j) * commutant.basis[static_cast<size_t>(kk)];
    out.basis.push_back(std::move(t));
  }
  out.unital = true;
  if (!out.closed_under_multiplication(ctx))
    raise(ErrorCode::NumericalFailure, "invariance algebra lost multiplicativity");
  return out;
}

namespace {

void validate_commutant_positive(const StinespringTriple& triple, const CMatrix& d,
                                 const OperatorAlgebraSpan& commutant,
                                 const NumericContext& ctx) {
  if (d.rows() != triple.rep.total_dim || d.cols() != triple.rep.total_dim)
    raise(ErrorCode::ShapeMismatch, "operator does not act on the dilation space");
  if (!approx_equal(d, d.adjoint().eval(), ctx.eps_eq))
    raise(ErrorCode::ShapeMismatch, "operator is not Hermitian");
  if (!commutant.contains(d, ctx))
    raise(ErrorCode::ShapeMismatch, "operator is not in the commutant");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint().eval()),
                                            Eigen::EigenvaluesOnly);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -ctx.eps_eq * scale)
    raise(ErrorCode::NotPSD, "operator is not positive");
}

double inverse_spectral_norm(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  double smin = svd.singularValues().minCoeff();
  return smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

FZCertificate fz_find_certificate(const StinespringTriple& triple, const CMatrix& d,
                                  const NumericContext& ctx) {
  OperatorAlgebraSpan commutant = commutant_basis(triple.rep, ctx);
  validate_commutant_positive(triple, d, commutant, ctx);

  const CMatrix& v = triple.isometry;
  CMatrix compressed = v.adjoint() * d * v;
  Eigen::SelfAdjointEigenSolver<CMatrix> ces(
      CMatrix(0.5 * (compressed + compressed.adjoint())), Eigen::EigenvaluesOnly);
  double cmax = std::max(1e-300, ces.eigenvalues().cwiseAbs().maxCoeff());
  if (ces.eigenvalues().minCoeff() <= ctx.eps_eq * cmax)
    raise(ErrorCode::SingularCompression, "V^* D V is not invertible");

  PureDecomposition dec = decompose_into_pures(triple, ctx);
  if (!dec.decomposable)
    raise(ErrorCode::Unsupported,
          "map is outside the supported classes (no pure-sum structure)");

  // Detect incomparable pairs. A coupling D entry across such a pair that no
  // summand range dominates makes a factor in the invariance algebra
  // impossible; otherwise the instance sits outside the chain class.
  std::vector<CMatrix> d_blocks = triple.rep.extract_commutant_blocks(d);
  bool any_incomparable = false;
  bool obstructed = false;
  for (size_t i = 0; i < dec.spec.summands.size(); ++i) {
    for (size_t j = i + 1; j < dec.spec.summands.size(); ++j) {
      const PureSummand& a = dec.spec.summands[i];
      const PureSummand& b = dec.spec.summands[j];
      if (a.block != b.block) continue;
      Index n = dec.spec.algebra.block_dim(a.block);
      Subspace ra{n, a.range_isometry};
      Subspace rb{n, b.range_isometry};
      if (subspace_compare(ra, rb, ctx) != SubspaceOrder::Incomparable) continue;
      any_incomparable = true;

      const CMatrix& dk = d_blocks[static_cast<size_t>(a.block)];
      CMatrix coupling = dec.k_bases[i].adjoint() * dk * dec.k_bases[j];
      bool coupled = coupling.norm() > ctx.eps_eq * (1.0 + dk.norm());
      bool dominated = false;
      for (size_t l = 0; l < dec.spec.summands.size() && !dominated; ++l) {
        const PureSummand& c = dec.spec.summands[l];
        if (c.block != a.block) continue;
        Subspace rc{n, c.range_isometry};
        SubspaceOrder ca = subspace_compare(ra, rc, ctx);
        SubspaceOrder cb = subspace_compare(rb, rc, ctx);
        bool a_below = ca == SubspaceOrder::ProperSub || ca == SubspaceOrder::Equal;
        bool b_below = cb == SubspaceOrder::ProperSub || cb == SubspaceOrder::Equal;
        dominated = a_below && b_below;
      }
      if (coupled && !dominated) obstructed = true;
    }
  }
  if (obstructed)
    raise(ErrorCode::FactorizationFailed,
          "D couples two non-nested ranges; every factor in the invariance "
          "algebra is block diagonal across that pair");
  if (any_incomparable)
    raise(ErrorCode::Unsupported,
          "ranges are not nested; factorization outside the chain class is "
          "not attempted");

  // Nested case: factor blockwise in multiplicity coordinates ordered by
  // descending range dimension, where the invariance algebra is triangular.
  std::vector<CMatrix> s_blocks;
  for (Index b = 0; b < triple.rep.algebra.num_blocks(); ++b) {
    Index m = triple.rep.multiplicities[static_cast<size_t>(b)];
    if (m == 0) {
      s_blocks.push_back(CMatrix::Zero(0, 0));
      continue;
    }
    std::vector<size_t> members;
    for (size_t i = 0; i < dec.spec.summands.size(); ++i)
      if (dec.spec.summands[i].block == b) members.push_back(i);
    std::sort(members.begin(), members.end(), [&](size_t x, size_t y) {
      return dec.spec.summands[x].range_isometry.cols() >
             dec.spec.summands[y].range_isometry.cols();
    });
    CMatrix basis(m, m);
    Index col = 0;
    for (size_t idx : members) {
      basis.middleCols(col, dec.k_bases[idx].cols()) = dec.k_bases[idx];
      col += dec.k_bases[idx].cols();
    }
    if (col != m)
      raise(ErrorCode::NumericalFailure, "multiplicity coordinates incomplete");

    CMatrix adapted = basis.adjoint() * d_blocks[static_cast<size_t>(b)] * basis;
    Nest coord_nest = make_nest(m, {}, ctx);
    std::vector<Subspace> chain_members;
    for (Index c = 1; c < m; ++c) {
      Subspace s{m, CMatrix::Zero(m, c)};
      s.basis.topRows(c) = CMatrix::Identity(c, c);
      chain_members.push_back(std::move(s));
    }
    coord_nest = make_nest(m, chain_members, ctx);
    CMatrix factor;
    try {
      factor = nest_cholesky(adapted, coord_nest, ctx);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotPD)
        raise(ErrorCode::FactorizationFailed,
              "multiplicity-side block of D is numerically singular");
      throw;
    }
    s_blocks.push_back(basis * factor * basis.adjoint());
  }

  FZCertificate cert;
  cert.d = d;
  cert.s = triple.rep.embed_commutant(s_blocks);
  cert.z = v.adjoint() * cert.s * v;

  FzVerification check = fz_verify_certificate(triple, cert, ctx);
  cert.residuals = check.residuals;
  if (!check.ok)
    raise(ErrorCode::FactorizationFailed,
          "certificate identities exceeded tolerance after construction");
  return cert;
}

FzVerification fz_verify_certificate(const StinespringTriple& triple,
                                     const FZCertificate& cert,
                                     const NumericContext& ctx) {
  FzVerification out;
  OperatorAlgebraSpan commutant = commutant_basis(triple.rep, ctx);
  const CMatrix& v = triple.isometry;
  CMatrix p = v * v.adjoint();

  out.residuals["s_in_commutant"] = rel_residual(commutant.project(cert.s), cert.s);
  out.residuals["factorization"] = rel_residual(CMatrix(cert.s.adjoint() * cert.s), cert.d);
  out.residuals["range_invariance"] =
      (cert.s * p - p * cert.s * p).norm() / (1.0 + cert.s.norm());
  CMatrix z = v.adjoint() * cert.s * v;
  out.residuals["z_consistency"] = rel_residual(z, cert.z);

  double z_min = Eigen::JacobiSVD<CMatrix>(cert.z).singularValues().minCoeff();
  out.residuals["z_min_singular_value"] = z_min;
  bool z_invertible = z_min > ctx.eps_eq * (1.0 + operator_norm(cert.z));

  double inv_z = inverse_spectral_norm(cert.z);
  CMatrix compressed = v.adjoint() * cert.d * v;
  double inv_d = inverse_spectral_norm(compressed);
  double norm_identity =
      std::abs(inv_z * inv_z - inv_d) / std::max(1.0, std::abs(inv_d));
  out.residuals["norm_identity"] = norm_identity;

  out.ok = out.residuals["s_in_commutant"] <= ctx.eps_eq &&
           out.residuals["factorization"] <= ctx.eps_eq &&
           out.residuals["range_invariance"] <= ctx.eps_eq &&
           out.residuals["z_consistency"] <= ctx.eps_eq && z_invertible &&
           norm_identity <= 1e-6;
  return out;
}

ProperCombination proper_combination_build(const StinespringTriple& triple,
                                           const CMatrix& d,
                                           std::optional<double> alpha,
                                           const NumericContext& ctx) {
  OperatorAlgebraSpan commutant = commutant_basis(triple.rep, ctx);
  validate_commutant_positive(triple, d, commutant, ctx);
  const CMatrix& v = triple.isometry;
  const Index h = triple.map.out_dim;
  const Index dim = triple.rep.total_dim;

  double norm_d = operator_norm(d);
  if (norm_d <= 0.0)
    raise(ErrorCode::ShapeMismatch, "direction D must be nonzero");
  double a = alpha.value_or(1.0 / (2.0 * norm_d));
  if (!(a > 0.0) || !(a < 1.0 / norm_d))
    raise(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1/||D||)");

  CMatrix compressed = v.adjoint() * d * v;
  if (!is_positive_invertible(CMatrix(0.5 * (compressed + compressed.adjoint())), ctx))
    raise(ErrorCode::SingularCompression, "V^* D V is not invertible");

  CMatrix id = CMatrix::Identity(dim, dim);
  CMatrix t1 = psd_sqrt(CMatrix(a * compressed), ctx);
  CMatrix t2 = psd_sqrt(CMatrix(v.adjoint() * (id - a * d) * v), ctx);

  CMatrix sum = t1.adjoint() * t1 + t2.adjoint() * t2;
  if (!approx_equal(sum, CMatrix::Identity(h, h), ctx.eps_eq))
    raise(ErrorCode::NumericalFailure, "coefficient identity failed");

  CMatrix root_d = psd_sqrt(d, ctx);
  CMatrix root_rest = psd_sqrt(CMatrix(id - a * d), ctx);
  CMatrix x1 = std::sqrt(a) * root_d * v * t1.inverse();
  CMatrix x2 = root_rest * v * t2.inverse();

  ProperCombination out;
  out.coefficients = {t1, t2};
  out.components = {ucp_from_dilation(triple.rep, x1, ctx, true),
                    ucp_from_dilation(triple.rep, x2, ctx, true)};

  for (const AlgebraElement& g : matrix_unit_generators(triple.map.algebra)) {
    CMatrix reassembled =
        t1.adjoint() * apply(out.components[0], g) * t1 +
        t2.adjoint() * apply(out.components[1], g) * t2;
    if (!approx_equal(reassembled, apply(triple.map, g), ctx.eps_eq))
      raise(ErrorCode::NumericalFailure, "reassembly failed on a generator");
  }
  return out;
}

CMatrix zhou_compression(const UcpMap& phi, const UcpMap& psi,
                         const NumericContext& ctx) {
  StinespringTriple triple = minimal_stinespring(phi, ctx);
  CMatrix psi_unit = apply(psi, algebra_identity(psi.algebra));
  if (!is_positive_invertible(CMatrix(0.5 * (psi_unit + psi_unit.adjoint())), ctx))
    raise(ErrorCode::SingularCompression, "psi(1) is not invertible");

  RnResult rn = rn_derivative(triple, psi, ctx);
  FZCertificate cert = fz_find_certificate(triple, rn.derivative, ctx);
  const CMatrix& t = cert.z;
  for (const AlgebraElement& g : matrix_unit_generators(phi.algebra))
    if (!approx_equal(CMatrix(t.adjoint() * apply(phi, g) * t), apply(psi, g),
                      ctx.eps_eq))
      raise(ErrorCode::NumericalFailure,
            "compression identity failed on a generator");
  return t;
}

MultiplicityFreeReport multiplicity_free_extreme_check(const UcpMap& phi,
                                                       const NumericContext& ctx) {
  StinespringTriple triple = minimal_stinespring(phi, ctx);
  for (Index m : triple.rep.multiplicities)
    if (m > 1)
      raise(ErrorCode::NotMultiplicityFree,
            "dilation has a block of multiplicity >= 2");
  MultiplicityFreeReport report;
  report.cstar = cstar_extreme(phi, ctx);
  report.extreme = is_extreme(phi, ctx);
  report.consistent = !(report.cstar.verdict == Verdict::True &&
                        report.extreme.verdict != Verdict::True);
  return report;
}

}  // namespace cstar
