#include "cstar/kmapprox.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace cstar {

namespace {

UcpMap default_anchor(const UcpMap& phi, const NumericContext& ctx) {
  // Vector state at the first coordinate of the first block, broadcast
  // over the output space: xi(a) = <e_1, a_1 e_1> I.
  Index n = phi.algebra.block_dim(0);
  Index h = phi.out_dim;
  std::vector<std::vector<CMatrix>> kraus(
      static_cast<size_t>(phi.algebra.num_blocks()));
  for (Index j = 0; j < h; ++j) {
    CMatrix op = CMatrix::Zero(n, h);
    op(0, j) = 1.0;
    kraus[0].push_back(std::move(op));
  }
  return ucp_from_kraus(phi.algebra, h, std::move(kraus), ctx, true);
}

}  // namespace

KMApproximant km_build(const UcpMap& phi, std::optional<UcpMap> anchor,
                       const NumericContext& ctx) {
  if (phi.kraus_count() == 0)
    raise(ErrorCode::EmptyComponentList, "base map has no components");
  if (!phi.unital)
    raise(ErrorCode::NotUnital, "base map must be unital");

  KMApproximant out;
  out.base = phi;
  out.anchor = anchor ? *anchor : default_anchor(phi, ctx);
  if (!(out.anchor.algebra == phi.algebra) || out.anchor.out_dim != phi.out_dim)
    raise(ErrorCode::AlgebraMismatch, "anchor acts on a different space");
  if (cstar_extreme(out.anchor, ctx).verdict != Verdict::True)
    raise(ErrorCode::AnchorNotCertified, "anchor failed the C*-extremity decision");

  const Index h = phi.out_dim;
  for (Index b = 0; b < phi.algebra.num_blocks(); ++b) {
    for (const CMatrix& v : phi.kraus[static_cast<size_t>(b)]) {
      KMComponent comp;
      comp.block = b;
      comp.kraus = v;
      comp.weight = v.adjoint() * v;
      PolarParts polar = polar_decompose(v, ctx);
      comp.polar = polar.partial_isometry;

      // First usably large column of W, normalized; deterministic tie-break.
      Index unit_col = 0;
      for (Index j = 1; j < comp.polar.cols(); ++j)
        if (comp.polar.col(j).norm() > comp.polar.col(unit_col).norm()) unit_col = j;
      for (Index j = 0; j < comp.polar.cols(); ++j)
        if (comp.polar.col(j).norm() > 1e-8) {
          unit_col = j;
          break;
        }
      CVector e = comp.polar.col(unit_col);
      double norm = e.norm();
      if (norm <= ctx.eps_rank)
        raise(ErrorCode::NumericalFailure, "component has a zero polar part");
      comp.unit = e / norm;

      // xi = W^* a W + <e, a e> (1 - W^* W), unital by construction.
      Subspace complement = null_basis(comp.polar, ctx);
      std::vector<std::vector<CMatrix>> kraus(
          static_cast<size_t>(phi.algebra.num_blocks()));
      kraus[static_cast<size_t>(b)].push_back(comp.polar);
      for (Index j = 0; j < complement.dim(); ++j)
        kraus[static_cast<size_t>(b)].push_back(
            CMatrix(comp.unit * complement.basis.col(j).adjoint()));
      comp.summand = ucp_from_kraus(phi.algebra, h, std::move(kraus), ctx, true);
      if (cstar_extreme(comp.summand, ctx).verdict != Verdict::True)
        raise(ErrorCode::NumericalFailure,
              "component summand failed its C*-extremity certificate");
      out.components.push_back(std::move(comp));
    }
  }

  CMatrix remaining = CMatrix::Identity(h, h);
  out.remainders.push_back(remaining);
  for (const KMComponent& comp : out.components) {
    remaining = remaining - comp.weight;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(
        CMatrix(0.5 * (remaining + remaining.adjoint())), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -10.0 * ctx.eps_eq)
      raise(ErrorCode::NumericalFailure, "remainder lost positivity");
    out.remainders.push_back(remaining);
  }
  return out;
}

KMStep km_step(const KMApproximant& approx, Index n, const NumericContext& ctx) {
  const Index count = static_cast<Index>(approx.components.size());
  if (n < 0 || n > count)
    raise(ErrorCode::IndexOutOfRange, "step index exceeds the component count");
  const Index h = approx.base.out_dim;

  KMStep step;
  CMatrix b_root = psd_sqrt(approx.remainders[static_cast<size_t>(n)], ctx);
  step.coefficients.push_back(b_root);

  std::vector<std::vector<CMatrix>> kraus(
      static_cast<size_t>(approx.base.algebra.num_blocks()));
  for (Index b = 0; b < approx.base.algebra.num_blocks(); ++b)
    for (const CMatrix& op : approx.anchor.kraus[static_cast<size_t>(b)])
      kraus[static_cast<size_t>(b)].push_back(op * b_root);

  for (Index j = 0; j < n; ++j) {
    const KMComponent& comp = approx.components[static_cast<size_t>(j)];
    CMatrix a_root = psd_sqrt(comp.weight, ctx);
    step.coefficients.push_back(a_root);
    for (Index b = 0; b < approx.base.algebra.num_blocks(); ++b)
      for (const CMatrix& op : comp.summand.kraus[static_cast<size_t>(b)])
        kraus[static_cast<size_t>(b)].push_back(op * a_root);
  }

  CMatrix sum = CMatrix::Zero(h, h);
  for (const CMatrix& c : step.coefficients) sum += c.adjoint() * c;
  step.coefficient_residual = (sum - CMatrix::Identity(h, h)).norm();

  step.psi = ucp_from_kraus(approx.base.algebra, h, std::move(kraus), ctx, true);
  return step;
}

CMatrix km_tail(const KMApproximant& approx, const AlgebraElement& a, Index n) {
  if (!(a.algebra == approx.base.algebra))
    raise(ErrorCode::AlgebraMismatch, "km_tail: element from a different algebra");
  const Index h = approx.base.out_dim;
  CMatrix out = CMatrix::Zero(h, h);
  for (size_t j = static_cast<size_t>(n); j < approx.components.size(); ++j) {
    const KMComponent& comp = approx.components[j];
    out += comp.kraus.adjoint() * a.blocks[static_cast<size_t>(comp.block)] * comp.kraus;
  }
  return out;
}

double bw_distance_on(const UcpMap& phi, const UcpMap& psi,
                      const std::vector<AlgebraElement>& test_set,
                      const NumericContext& ctx) {
  (void)ctx;
  if (!(phi.algebra == psi.algebra) || phi.out_dim != psi.out_dim)
    raise(ErrorCode::AlgebraMismatch, "bw_distance_on: maps act on different spaces");
  double worst = 0.0;
  for (const AlgebraElement& a : test_set)
    worst = std::max(worst, operator_norm(CMatrix(apply(phi, a) - apply(psi, a))));
  return worst;
}

}  // namespace cstar
