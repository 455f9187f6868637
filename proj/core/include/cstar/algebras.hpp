#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cstar/numerics.hpp"

namespace cstar {

/// Finite-dimensional C*-algebra presented as a direct sum of full matrix
/// blocks M_{n_1} (+) ... (+) M_{n_m}.
struct FiniteCStarAlgebra {
  std::vector<Index> block_dims;

  Index num_blocks() const { return static_cast<Index>(block_dims.size()); }
  Index block_dim(Index b) const { return block_dims[static_cast<size_t>(b)]; }
  bool operator==(const FiniteCStarAlgebra& other) const {
    return block_dims == other.block_dims;
  }
  void validate() const;
};

struct AlgebraElement {
  FiniteCStarAlgebra algebra;
  std::vector<CMatrix> blocks;

  void validate() const;
  AlgebraElement adjoint() const;
};

AlgebraElement algebra_identity(const FiniteCStarAlgebra& algebra);
AlgebraElement algebra_zero(const FiniteCStarAlgebra& algebra);

/// One element per matrix unit E_ij of every block, in block-major order.
/// These span the algebra, so linear identities checked on them hold globally.
std::vector<AlgebraElement> matrix_unit_generators(const FiniteCStarAlgebra& algebra);

/// Concrete unital *-representation with per-block multiplicities: block b acts
/// on C^{n_b} (x) C^{m_b}, laid out contiguously in block order with row index
/// i * m_b + j inside the block.
struct Representation {
  FiniteCStarAlgebra algebra;
  std::vector<Index> multiplicities;
  Index total_dim = 0;

  Index block_offset(Index b) const;
  Index block_size(Index b) const {
    return algebra.block_dim(b) * multiplicities[static_cast<size_t>(b)];
  }
  CMatrix apply(const AlgebraElement& a) const;
  CMatrix block_projector(Index b) const;

  /// Embed a K-side operator family: (+)_b I_{n_b} (x) T_b for T_b of size m_b.
  CMatrix embed_commutant(const std::vector<CMatrix>& k_blocks) const;
  /// Inverse of embed_commutant for operators known to lie in the commutant.
  std::vector<CMatrix> extract_commutant_blocks(const CMatrix& t) const;
};

Representation rep_build(const FiniteCStarAlgebra& algebra,
                         const std::vector<Index>& multiplicities);

/// Linear span of operators on a fixed space, kept HS-orthonormal.
struct OperatorAlgebraSpan {
  Index ambient_dim = 0;
  std::vector<CMatrix> basis;
  bool unital = false;

  Index dim() const { return static_cast<Index>(basis.size()); }
  /// HS-orthogonal projection of t onto the span.
  CMatrix project(const CMatrix& t) const;
  bool contains(const CMatrix& t, const NumericContext& ctx = {}) const;
  bool closed_under_multiplication(const NumericContext& ctx = {}) const;
};

/// HS-orthonormalize a spanning family (rank decided by eps_rank).
OperatorAlgebraSpan span_from_family(Index ambient_dim,
                                     const std::vector<CMatrix>& family,
                                     const NumericContext& ctx = {});

/// Commutant { X : X pi(g) = pi(g) X for all matrix-unit generators g }.
/// Enforces the structural dimension sum of m_b^2; StructureMismatch otherwise.
OperatorAlgebraSpan commutant_basis(const Representation& rep,
                                    const NumericContext& ctx = {});

/// Strictly increasing chain of subspaces with {0} and the full space adjoined.
struct Nest {
  Index ambient_dim = 0;
  std::vector<Subspace> chain;

  Index length() const { return static_cast<Index>(chain.size()); }
};

/// Sort the given subspaces by dimension, adjoin endpoints, drop duplicates,
/// and verify strict inclusions. NestMismatch on ambient mismatch, Unsupported
/// if two members are incomparable.
Nest make_nest(Index ambient_dim, std::vector<Subspace> members,
               const NumericContext& ctx = {});

/// Orthonormal basis adapted to the nest: successive gap complements
/// E_i (-) E_{i-1}, each built by Gram-Schmidt in original coordinate order.
CMatrix nest_adapted_basis(const Nest& nest, const NumericContext& ctx = {});

/// Basis of { T : T E subset of E for every nest member E }.
OperatorAlgebraSpan alg_of_nest(const Nest& nest, const NumericContext& ctx = {});

/// Factor a positive invertible D as S^* S with S and S^{-1} in Alg(nest).
/// Pivots at or below eps_eq * ||D|| abort with NotPD.
CMatrix nest_cholesky(const CMatrix& d, const Nest& nest,
                      const NumericContext& ctx = {});

/// Smallest subspace containing v that is invariant under every basis element.
Subspace invariant_closure(const OperatorAlgebraSpan& m, const CVector& v,
                           const NumericContext& ctx = {});

struct NestExtraction {
  bool is_nest = false;
  std::optional<Nest> nest;
  std::optional<std::pair<Subspace, Subspace>> witness;  // incomparable pair
};

/// Sample invariant subspaces from coordinate vectors and pairwise sums,
/// close under join/meet, and test total ordering.
NestExtraction lat_nest_extract(const OperatorAlgebraSpan& m,
                                const NumericContext& ctx = {});

struct ReflexivityReport {
  bool reflexive = false;
  NestExtraction extraction;
  Index span_dim = 0;
  Index nest_algebra_dim = 0;
};

/// True iff the extracted invariant-subspace family is a chain and the nest
/// algebra of that chain has the same span as m.
ReflexivityReport is_reflexive_nest_algebra(const OperatorAlgebraSpan& m,
                                            const NumericContext& ctx = {});

}  // namespace cstar
