#pragma once

#include <string>
#include <vector>

#include "cstar/algebras.hpp"
#include "cstar/numerics.hpp"

namespace cstar {

/// A completely positive map from a finite-dimensional C*-algebra into
/// B(C^out_dim), stored in Kraus form: per block b, a family of operators
/// V : C^out_dim -> C^{n_b}, with phi(a) = sum_{b,i} V_{b,i}^* a_b V_{b,i}.
/// `unital` distinguishes UCP maps from plain CP payloads.
struct UcpMap {
  FiniteCStarAlgebra algebra;
  Index out_dim = 0;
  std::vector<std::vector<CMatrix>> kraus;
  bool unital = true;

  Index kraus_count() const;
};

/// Validates shapes and (unless require_unital is false) unitality.
UcpMap ucp_from_kraus(const FiniteCStarAlgebra& algebra, Index out_dim,
                      std::vector<std::vector<CMatrix>> kraus,
                      const NumericContext& ctx = {}, bool require_unital = true);

/// sum V^* V - I, the unitality defect.
CMatrix unitality_defect(const UcpMap& map);

CMatrix apply(const UcpMap& map, const AlgebraElement& a);

/// Per-block Choi matrices sum_i vec(V_i) vec(V_i)^*; canonical carrier for
/// rank and spectrum comparisons.
std::vector<CMatrix> choi_blocks(const UcpMap& map);

/// Minimal dilation phi(a) = V^* pi(a) V with pi = (+)_b (a_b (x) I_{m_b});
/// m_b is the HS-rank of block b's Kraus family.
struct StinespringTriple {
  UcpMap map;
  Representation rep;
  CMatrix isometry;  // V : C^out_dim -> dilation space
  bool minimal = true;
};

StinespringTriple minimal_stinespring(const UcpMap& map, const NumericContext& ctx = {});

/// Read a dilation-space operator X : C^h -> H_pi back into Kraus form by
/// slicing over multiplicity indices; inverse of the dilation assembly.
UcpMap ucp_from_dilation(const Representation& rep, const CMatrix& x,
                         const NumericContext& ctx = {}, bool require_unital = true);

enum class GeneratorOrder { Forward, Reversed };

struct RnResult {
  CMatrix derivative;   // D in the commutant, as a dilation-space operator
  double residual = 0;  // least-squares defect over all generators
  double eig_min = 0;
  double eig_max = 0;
  bool dominated = false;  // 0 <= D <= I within eps_eq
};

/// Unique D in pi(A)' with psi(a) = V^* D pi(a) V. Throws NotDominated when
/// no such D exists within eps_eq, or -- unless require_dominated is false --
/// when D falls outside [0, I].
RnResult rn_derivative(const StinespringTriple& phi, const UcpMap& psi,
                       const NumericContext& ctx = {},
                       GeneratorOrder order = GeneratorOrder::Forward,
                       bool require_dominated = true);

UcpMap direct_sum(const std::vector<UcpMap>& maps, const NumericContext& ctx = {});
UcpMap tensor(const UcpMap& phi1, const UcpMap& phi2, const NumericContext& ctx = {});
UcpMap compress(const UcpMap& phi, const CMatrix& w, const NumericContext& ctx = {});

/// True iff the minimal dilation has total multiplicity signature sum m_b^2 = 1.
bool is_pure(const UcpMap& phi, const NumericContext& ctx = {});

/// True iff the minimal dilations share no block (structural test), cross
/// checked against the intertwiner space being zero.
bool is_disjoint(const UcpMap& phi1, const UcpMap& phi2, const NumericContext& ctx = {});

enum class EquivalenceVerdict { Yes, No, Inconclusive };

struct UnitaryEquivalence {
  EquivalenceVerdict verdict = EquivalenceVerdict::Inconclusive;
  CMatrix unitary;     // phi2(g) = U^* phi1(g) U on all generators (Yes only)
  std::string reason;
};

UnitaryEquivalence unitarily_equivalent(const UcpMap& phi1, const UcpMap& phi2,
                                        const NumericContext& ctx = {});

}  // namespace cstar
