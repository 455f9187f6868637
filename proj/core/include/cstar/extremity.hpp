#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cstar/cpmaps.hpp"

namespace cstar {

enum class Verdict { True, False, Unsupported };

const char* verdict_name(Verdict v);

/// One pure summand psi (x) I_k: a compression of block `block` onto
/// ran(range_isometry), tensored with a k-dimensional multiplicity space.
struct PureSummand {
  Index block = 0;
  CMatrix range_isometry;  // n_block x d, orthonormal columns
  Index multiplicity = 1;
};

struct PureSumSpec {
  FiniteCStarAlgebra algebra;
  std::vector<PureSummand> summands;
};

/// Merge summands with equal block and equal range (multiplicities add), so
/// distinct summands are pairwise non-unitarily-equivalent.
PureSumSpec merge_summands(const PureSumSpec& spec, const NumericContext& ctx = {});

/// The direct sum (+)_i psi_i (x) I_{k_i} as a concrete UcpMap.
UcpMap assemble_pure_sum(const PureSumSpec& spec, const NumericContext& ctx = {});

struct DecisionReport {
  Verdict verdict = Verdict::Unsupported;
  std::string notes;
  /// Nonzero commutant element annihilated by T -> V^* T V (extremity failures).
  std::optional<CMatrix> kernel_witness;
  /// Two invariant ranges with neither containing the other (nest failures).
  std::optional<std::pair<Subspace, Subspace>> incomparable_witness;
  /// Reconstruction defect when a map fails to split into pures.
  std::optional<double> residual;
  /// Extracted pure-sum structure on True verdicts (and for diagnostics).
  std::optional<PureSumSpec> decomposition;
  /// Reflexivity of the multiplicity-side invariance algebra (normal case).
  std::optional<bool> m_reflexive;
};

/// Linear extreme-point test: T -> V^* T V injective on the commutant.
DecisionReport is_extreme(const UcpMap& phi, const NumericContext& ctx = {});

/// Pairwise test V_i^* V_j != 0 for summands of one block; cross-checked
/// against is_extreme on the assembled map.
DecisionReport is_extreme_pure_sum(const PureSumSpec& spec,
                                   const NumericContext& ctx = {});

struct PureDecomposition {
  bool decomposable = false;
  PureSumSpec spec;                 // grouped by block, sorted by range dim
  std::vector<CMatrix> k_bases;     // per summand: m_block x k_i orthonormal
  double residual = 0.0;            // reconstruction defect
};

/// Split the dilation range into (+) G_i (x) K_i per block, or report the
/// reconstruction residual when no such splitting exists.
PureDecomposition decompose_into_pures(const StinespringTriple& triple,
                                       const NumericContext& ctx = {});

/// Nest test: within each block the merged ranges must form a chain.
DecisionReport cstar_extreme_pure_sum(const PureSumSpec& spec,
                                      const NumericContext& ctx = {});

/// Full decision for a UcpMap. Splits into pures when possible and runs the
/// nest test; a single-block map that does not split is decidedly not
/// C*-extreme, while multi-block non-split maps are Unsupported.
DecisionReport cstar_extreme(const UcpMap& phi, const NumericContext& ctx = {});

/// Decision for a subspace V(C^h) of C^g (x) C^k given by an isometry V.
/// NonMinimal unless the partial trace of the range projector over C^g has
/// full rank k. The report carries the multiplicity-side algebra reflexivity.
DecisionReport cstar_extreme_normal(const CMatrix& v, Index g, Index k,
                                    const NumericContext& ctx = {});

/// { T in commutant : T VV^* = VV^* T VV^* }, i.e. commutant elements leaving
/// the dilated range invariant.
OperatorAlgebraSpan m_algebra(const StinespringTriple& triple,
                              const NumericContext& ctx = {});

struct FZCertificate {
  CMatrix d;  // positive element of the commutant
  CMatrix s;  // factor: d = s^* s, s leaves VH invariant
  CMatrix z;  // V^* s V, invertible
  std::map<std::string, double> residuals;
};

/// Construct the factorization certificate for d via nest Cholesky in
/// multiplicity coordinates ordered along the range chain.
FZCertificate fz_find_certificate(const StinespringTriple& triple, const CMatrix& d,
                                  const NumericContext& ctx = {});

struct FzVerification {
  bool ok = false;
  std::map<std::string, double> residuals;
};

/// Pure verification of the certificate identities; independent of how the
/// certificate was produced.
FzVerification fz_verify_certificate(const StinespringTriple& triple,
                                     const FZCertificate& cert,
                                     const NumericContext& ctx = {});

struct ProperCombination {
  std::vector<CMatrix> coefficients;  // invertible, sum T_i^* T_i = I
  std::vector<UcpMap> components;
};

/// Split phi as T_1^* phi_1 T_1 + T_2^* phi_2 T_2 along a positive commutant
/// direction d; alpha defaults to 1 / (2 ||d||).
ProperCombination proper_combination_build(const StinespringTriple& triple,
                                           const CMatrix& d,
                                           std::optional<double> alpha = std::nullopt,
                                           const NumericContext& ctx = {});

/// For dominated psi with invertible psi(1), produce invertible T with
/// psi = T^* phi(.) T, via the certificate of the derivative of psi.
CMatrix zhou_compression(const UcpMap& phi, const UcpMap& psi,
                         const NumericContext& ctx = {});

struct MultiplicityFreeReport {
  DecisionReport cstar;
  DecisionReport extreme;
  bool consistent = false;  // cstar True implies extreme True
};

/// Implication harness for maps whose dilation is multiplicity-free.
MultiplicityFreeReport multiplicity_free_extreme_check(const UcpMap& phi,
                                                       const NumericContext& ctx = {});

}  // namespace cstar
