#include "cstar/cpmaps.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cstar/random.hpp"

namespace cstar {

Index UcpMap::kraus_count() const {
  Index count = 0;
  for (const auto& block : kraus) count += static_cast<Index>(block.size());
  return count;
}

UcpMap ucp_from_kraus(const FiniteCStarAlgebra& algebra, Index out_dim,
                      std::vector<std::vector<CMatrix>> kraus,
                      const NumericContext& ctx, bool require_unital) {
  algebra.validate();
  if (out_dim < 1) raise(ErrorCode::ShapeMismatch, "out_dim must be >= 1");
  if (static_cast<Index>(kraus.size()) != algebra.num_blocks())
    raise(ErrorCode::ShapeMismatch, "kraus block count does not match algebra");
  for (Index b = 0; b < algebra.num_blocks(); ++b)
    for (const CMatrix& v : kraus[static_cast<size_t>(b)]) {
      if (v.rows() != algebra.block_dim(b) || v.cols() != out_dim)
        raise(ErrorCode::ShapeMismatch, "kraus operator has wrong shape");
      if (!all_finite(v))
        raise(ErrorCode::ShapeMismatch, "kraus operator has non-finite entries");
    }
  UcpMap map{algebra, out_dim, std::move(kraus), require_unital};
  if (require_unital) {
    double defect = unitality_defect(map).norm() / std::sqrt(static_cast<double>(out_dim));
    if (defect > ctx.eps_eq)
      raise(ErrorCode::NotUnital, "unitality residual " + std::to_string(defect));
  }
  return map;
}

CMatrix unitality_defect(const UcpMap& map) {
  CMatrix sum = CMatrix::Zero(map.out_dim, map.out_dim);
  for (const auto& block : map.kraus)
    for (const CMatrix& v : block) sum += v.adjoint() * v;
  return sum - CMatrix::Identity(map.out_dim, map.out_dim);
}

CMatrix apply(const UcpMap& map, const AlgebraElement& a) {
  if (!(a.algebra == map.algebra))
    raise(ErrorCode::AlgebraMismatch, "apply: element from a different algebra");
  CMatrix out = CMatrix::Zero(map.out_dim, map.out_dim);
  for (Index b = 0; b < map.algebra.num_blocks(); ++b)
    for (const CMatrix& v : map.kraus[static_cast<size_t>(b)])
      out += v.adjoint() * a.blocks[static_cast<size_t>(b)] * v;
  return out;
}

std::vector<CMatrix> choi_blocks(const UcpMap& map) {
  std::vector<CMatrix> out;
  for (Index b = 0; b < map.algebra.num_blocks(); ++b) {
    Index dim = map.algebra.block_dim(b) * map.out_dim;
    CMatrix c = CMatrix::Zero(dim, dim);
    for (const CMatrix& v : map.kraus[static_cast<size_t>(b)]) {
      CVector vv = vec(v);
      c += vv * vv.adjoint();
    }
    out.push_back(std::move(c));
  }
  return out;
}

StinespringTriple minimal_stinespring(const UcpMap& map, const NumericContext& ctx) {
  const Index blocks = map.algebra.num_blocks();
  std::vector<std::vector<CMatrix>> reduced(static_cast<size_t>(blocks));
  std::vector<Index> mults(static_cast<size_t>(blocks), 0);

  // Rank cutoff is relative to the largest Gram eigenvalue across all blocks,
  // so a block of numerically-zero operators cannot fake a multiplicity.
  std::vector<CMatrix> grams(static_cast<size_t>(blocks));
  double gram_scale = 0.0;
  for (Index b = 0; b < blocks; ++b) {
    const auto& family = map.kraus[static_cast<size_t>(b)];
    const Index count = static_cast<Index>(family.size());
    CMatrix gram(count, count);
    for (Index i = 0; i < count; ++i)
      for (Index j = 0; j < count; ++j)
        gram(i, j) = hs_inner(family[static_cast<size_t>(i)],
                              family[static_cast<size_t>(j)]);
    if (count > 0) gram_scale = std::max(gram_scale, operator_norm(gram));
    grams[static_cast<size_t>(b)] = std::move(gram);
  }

  for (Index b = 0; b < blocks; ++b) {
    const auto& family = map.kraus[static_cast<size_t>(b)];
    const Index count = static_cast<Index>(family.size());
    if (count == 0) continue;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(grams[static_cast<size_t>(b)]);
    const auto& ev = es.eigenvalues();
    double cutoff = ctx.eps_rank * gram_scale;
    // Largest eigenvalue first; ties resolved by the solver's fixed order.
    for (Index j = count - 1; j >= 0; --j) {
      if (ev(j) <= cutoff) break;
      CMatrix w = CMatrix::Zero(map.algebra.block_dim(b), map.out_dim);
      for (Index i = 0; i < count; ++i)
        w += es.eigenvectors()(i, j) * family[static_cast<size_t>(i)];
      reduced[static_cast<size_t>(b)].push_back(std::move(w));
    }
    mults[static_cast<size_t>(b)] =
        static_cast<Index>(reduced[static_cast<size_t>(b)].size());
  }

  Representation rep = rep_build(map.algebra, mults);
  CMatrix v = CMatrix::Zero(rep.total_dim, map.out_dim);
  for (Index b = 0; b < blocks; ++b) {
    Index off = rep.block_offset(b);
    Index n = map.algebra.block_dim(b);
    Index m = mults[static_cast<size_t>(b)];
    for (Index j = 0; j < m; ++j) {
      const CMatrix& w = reduced[static_cast<size_t>(b)][static_cast<size_t>(j)];
      for (Index i = 0; i < n; ++i) v.row(off + i * m + j) = w.row(i);
    }
  }

  StinespringTriple triple{map, rep, v, true};

  if (map.unital) {
    CMatrix gram_v = v.adjoint() * v;
    if (!approx_equal(gram_v, CMatrix::Identity(map.out_dim, map.out_dim), ctx.eps_eq))
      raise(ErrorCode::NumericalFailure, "dilation isometry defect exceeds eps_eq");
  }
  for (const AlgebraElement& g : matrix_unit_generators(map.algebra)) {
    CMatrix lhs = v.adjoint() * rep.apply(g) * v;
    if (!approx_equal(lhs, apply(map, g), ctx.eps_eq))
      raise(ErrorCode::NumericalFailure, "dilation does not reproduce the map");
  }
  return triple;
}

UcpMap ucp_from_dilation(const Representation& rep, const CMatrix& x,
                         const NumericContext& ctx, bool require_unital) {
  if (x.rows() != rep.total_dim)
    raise(ErrorCode::ShapeMismatch, "ucp_from_dilation: row count mismatch");
  const Index h = x.cols();
  std::vector<std::vector<CMatrix>> kraus(
      static_cast<size_t>(rep.algebra.num_blocks()));
  for (Index b = 0; b < rep.algebra.num_blocks(); ++b) {
    Index off = rep.block_offset(b);
    Index n = rep.algebra.block_dim(b);
    Index m = rep.multiplicities[static_cast<size_t>(b)];
    for (Index j = 0; j < m; ++j) {
      CMatrix slice(n, h);
      for (Index i = 0; i < n; ++i) slice.row(i) = x.row(off + i * m + j);
      kraus[static_cast<size_t>(b)].push_back(std::move(slice));
    }
  }
  return ucp_from_kraus(rep.algebra, h, std::move(kraus), ctx, require_unital);
}

RnResult rn_derivative(const StinespringTriple& phi, const UcpMap& psi,
                       const NumericContext& ctx, GeneratorOrder order,
                       bool require_dominated) {
  if (!(psi.algebra == phi.map.algebra))
    raise(ErrorCode::AlgebraMismatch, "rn_derivative: algebras differ");
  if (psi.out_dim != phi.map.out_dim)
    raise(ErrorCode::ShapeMismatch, "rn_derivative: out_dim differs");

  OperatorAlgebraSpan commutant = commutant_basis(phi.rep, ctx);
  std::vector<AlgebraElement> gens = matrix_unit_generators(phi.map.algebra);
  if (order == GeneratorOrder::Reversed) std::reverse(gens.begin(), gens.end());

  const Index h = phi.map.out_dim;
  const Index r = commutant.dim();
  const CMatrix& v = phi.isometry;
  CMatrix lhs(static_cast<Index>(gens.size()) * h * h, r);
  CVector rhs(static_cast<Index>(gens.size()) * h * h);
  Index row = 0;
  for (const AlgebraElement& g : gens) {
    CMatrix pg = phi.rep.apply(g);
    for (Index k = 0; k < r; ++k)
      lhs.col(k).segment(row, h * h) =
          vec(CMatrix(v.adjoint() * commutant.basis[static_cast<size_t>(k)] * pg * v));
    rhs.segment(row, h * h) = vec(apply(psi, g));
    row += h * h;
  }

  CVector coeff = lhs.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  RnResult result;
  result.residual = (lhs * coeff - rhs).norm() / (1.0 + rhs.norm());
  result.derivative = CMatrix::Zero(phi.rep.total_dim, phi.rep.total_dim);
  for (Index k = 0; k < r; ++k)
    result.derivative += coeff(k) * commutant.basis[static_cast<size_t>(k)];

  if (result.residual > ctx.eps_eq)
    raise(ErrorCode::NotDominated,
          "no commutant derivative reproduces psi (residual " +
              std::to_string(result.residual) + ")");

  CMatrix herm = 0.5 * (result.derivative + result.derivative.adjoint());
  if (!approx_equal(result.derivative, herm, ctx.eps_eq))
    raise(ErrorCode::NotDominated, "derivative is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  result.eig_min = es.eigenvalues().minCoeff();
  result.eig_max = es.eigenvalues().maxCoeff();
  result.dominated =
      result.eig_min >= -ctx.eps_eq && result.eig_max <= 1.0 + ctx.eps_eq;
  if (!result.dominated && require_dominated)
    raise(ErrorCode::NotDominated,
          "derivative spectrum [" + std::to_string(result.eig_min) + ", " +
              std::to_string(result.eig_max) + "] leaves [0, 1]");
  return result;
}

UcpMap direct_sum(const std::vector<UcpMap>& maps, const NumericContext& ctx) {
  if (maps.empty())
    raise(ErrorCode::ShapeMismatch, "direct_sum of an empty family");
  const FiniteCStarAlgebra& algebra = maps.front().algebra;
  Index total = 0;
  bool unital = true;
  for (const UcpMap& m : maps) {
    if (!(m.algebra == algebra))
      raise(ErrorCode::AlgebraMismatch, "direct_sum: algebras differ");
    total += m.out_dim;
    unital = unital && m.unital;
  }
  std::vector<std::vector<CMatrix>> kraus(static_cast<size_t>(algebra.num_blocks()));
  Index offset = 0;
  for (const UcpMap& m : maps) {
    for (Index b = 0; b < algebra.num_blocks(); ++b)
      for (const CMatrix& v : m.kraus[static_cast<size_t>(b)]) {
        CMatrix padded = CMatrix::Zero(v.rows(), total);
        padded.middleCols(offset, m.out_dim) = v;
        kraus[static_cast<size_t>(b)].push_back(std::move(padded));
      }
    offset += m.out_dim;
  }
  return ucp_from_kraus(algebra, total, std::move(kraus), ctx, unital);
}

UcpMap tensor(const UcpMap& phi1, const UcpMap& phi2, const NumericContext& ctx) {
  FiniteCStarAlgebra product;
  for (Index a = 0; a < phi1.algebra.num_blocks(); ++a)
    for (Index b = 0; b < phi2.algebra.num_blocks(); ++b)
      product.block_dims.push_back(phi1.algebra.block_dim(a) *
                                   phi2.algebra.block_dim(b));
  std::vector<std::vector<CMatrix>> kraus(static_cast<size_t>(product.num_blocks()));
  size_t slot = 0;
  for (Index a = 0; a < phi1.algebra.num_blocks(); ++a)
    for (Index b = 0; b < phi2.algebra.num_blocks(); ++b, ++slot)
      for (const CMatrix& v : phi1.kraus[static_cast<size_t>(a)])
        for (const CMatrix& w : phi2.kraus[static_cast<size_t>(b)])
          kraus[slot].push_back(kron(v, w));
  return ucp_from_kraus(product, phi1.out_dim * phi2.out_dim, std::move(kraus),
                        ctx, phi1.unital && phi2.unital);
}

UcpMap compress(const UcpMap& phi, const CMatrix& w, const NumericContext& ctx) {
  if (w.rows() != phi.out_dim)
    raise(ErrorCode::ShapeMismatch, "compress: isometry rows mismatch");
  CMatrix gram = w.adjoint() * w;
  if (!approx_equal(gram, CMatrix::Identity(w.cols(), w.cols()), ctx.eps_eq))
    raise(ErrorCode::NotIsometry, "compress: W^* W != I");
  std::vector<std::vector<CMatrix>> kraus(static_cast<size_t>(phi.algebra.num_blocks()));
  for (Index b = 0; b < phi.algebra.num_blocks(); ++b)
    for (const CMatrix& v : phi.kraus[static_cast<size_t>(b)])
      kraus[static_cast<size_t>(b)].push_back(v * w);
  return ucp_from_kraus(phi.algebra, w.cols(), std::move(kraus), ctx, phi.unital);
}

bool is_pure(const UcpMap& phi, const NumericContext& ctx) {
  StinespringTriple triple = minimal_stinespring(phi, ctx);
  Index sum = 0;
  for (Index m : triple.rep.multiplicities) sum += m * m;
  return sum == 1;
}

bool is_disjoint(const UcpMap& phi1, const UcpMap& phi2, const NumericContext& ctx) {
  if (!(phi1.algebra == phi2.algebra))
    raise(ErrorCode::AlgebraMismatch, "is_disjoint: algebras differ");
  StinespringTriple t1 = minimal_stinespring(phi1, ctx);
  StinespringTriple t2 = minimal_stinespring(phi2, ctx);

  bool structural = true;
  for (Index b = 0; b < phi1.algebra.num_blocks(); ++b)
    if (t1.rep.multiplicities[static_cast<size_t>(b)] > 0 &&
        t2.rep.multiplicities[static_cast<size_t>(b)] > 0)
      structural = false;

  std::vector<std::pair<CMatrix, CMatrix>> constraints;
  for (const AlgebraElement& g : matrix_unit_generators(phi1.algebra))
    constraints.emplace_back(t2.rep.apply(g), t1.rep.apply(g));
  bool intertwiner_zero =
      solve_linear_subspace(constraints, t2.rep.total_dim, t1.rep.total_dim, ctx)
          .empty();

  if (structural != intertwiner_zero)
    raise(ErrorCode::NumericalFailure,
          "structural and intertwiner disjointness tests disagree");
  return structural;
}

namespace {

bool choi_spectra_match(const UcpMap& phi1, const UcpMap& phi2, double eps) {
  std::vector<CMatrix> c1 = choi_blocks(phi1);
  std::vector<CMatrix> c2 = choi_blocks(phi2);
  for (size_t b = 0; b < c1.size(); ++b) {
    Eigen::SelfAdjointEigenSolver<CMatrix> e1(c1[b], Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<CMatrix> e2(c2[b], Eigen::EigenvaluesOnly);
    double scale = 1.0 + std::max(std::abs(e1.eigenvalues().maxCoeff()),
                                  std::abs(e2.eigenvalues().maxCoeff()));
    if (((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff()) > eps * scale)
      return false;
  }
  return true;
}

}  // namespace

UnitaryEquivalence unitarily_equivalent(const UcpMap& phi1, const UcpMap& phi2,
                                        const NumericContext& ctx) {
  if (!(phi1.algebra == phi2.algebra))
    raise(ErrorCode::AlgebraMismatch, "unitarily_equivalent: algebras differ");
  if (phi1.out_dim != phi2.out_dim)
    raise(ErrorCode::ShapeMismatch, "unitarily_equivalent: out_dim differs");

  UnitaryEquivalence result;
  StinespringTriple t1 = minimal_stinespring(phi1, ctx);
  StinespringTriple t2 = minimal_stinespring(phi2, ctx);
  if (t1.rep.multiplicities != t2.rep.multiplicities) {
    result.verdict = EquivalenceVerdict::No;
    result.reason = "multiplicity signatures differ";
    return result;
  }
  if (!choi_spectra_match(phi1, phi2, ctx.eps_eq)) {
    result.verdict = EquivalenceVerdict::No;
    result.reason = "Choi spectra differ";
    return result;
  }

  std::vector<AlgebraElement> gens = matrix_unit_generators(phi1.algebra);
  std::vector<std::pair<CMatrix, CMatrix>> constraints;
  for (const AlgebraElement& g : gens)
    constraints.emplace_back(apply(phi2, g), apply(phi1, g));
  std::vector<CMatrix> space =
      solve_linear_subspace(constraints, phi1.out_dim, phi1.out_dim, ctx);
  if (space.empty()) {
    result.verdict = EquivalenceVerdict::No;
    result.reason = "intertwiner space is zero";
    return result;
  }

  const Index h = phi1.out_dim;
  Rng rng(ctx.rng_seed ^ 0x9e3779b97f4a7c15ull);
  for (int attempt = 0; attempt < 4; ++attempt) {
    CMatrix x = CMatrix::Zero(h, h);
    for (const CMatrix& b : space)
      x += Complex(rng.gaussian(), rng.gaussian()) * b;
    PolarParts polar = polar_decompose(x, ctx);
    if (polar.partial_isometry.cols() != h) continue;  // rank-deficient draw
    CMatrix u = polar.partial_isometry;
    if (!approx_equal(u.adjoint() * u, CMatrix::Identity(h, h), ctx.eps_eq))
      continue;
    bool verified = true;
    for (const AlgebraElement& g : gens)
      if (!approx_equal(u * apply(phi1, g) * u.adjoint(), apply(phi2, g), ctx.eps_eq)) {
        verified = false;
        break;
      }
    if (verified) {
      result.verdict = EquivalenceVerdict::Yes;
      result.unitary = u.adjoint();  // phi2 = U^* phi1 U with U = u^*
      result.reason = "verified intertwining unitary";
      return result;
    }
  }
  result.verdict = EquivalenceVerdict::Inconclusive;
  result.reason = "generic intertwiner was singular or failed verification";
  return result;
}

}  // namespace cstar
