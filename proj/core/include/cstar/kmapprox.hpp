#pragma once

#include <optional>
#include <vector>

#include "cstar/extremity.hpp"

namespace cstar {

/// Data attached to one pure component V of the base map: A = V^* V, the
/// polar part W, a unit vector in ran(W), and the unital C*-extreme summand
/// built from them.
struct KMComponent {
  Index block = 0;
  CMatrix kraus;      // V : C^h -> C^n
  CMatrix weight;     // A = V^* V
  CMatrix polar;      // W with V = W A^{1/2}
  CVector unit;       // e in ran(W)
  UcpMap summand;     // zeta + (1 - P) theta, certified C*-extreme
};

struct KMApproximant {
  UcpMap base;
  UcpMap anchor;
  std::vector<KMComponent> components;
  std::vector<CMatrix> remainders;  // remainders[N] = I - sum_{j<=N} A_j, N = 0..count
};

/// Build the approximation ladder for a map given by its pure components
/// (its Kraus operators). The anchor must itself pass the C*-extremity
/// decision; by default it is the vector state at the first coordinate of
/// the first block, broadcast over the output space.
KMApproximant km_build(const UcpMap& phi, std::optional<UcpMap> anchor = std::nullopt,
                       const NumericContext& ctx = {});

struct KMStep {
  UcpMap psi;
  std::vector<CMatrix> coefficients;  // B_N^{1/2}, A_1^{1/2}, ..., A_N^{1/2}
  double coefficient_residual = 0.0;  // || sum c^* c - I ||
};

/// psi_N = B_N^{1/2} anchor B_N^{1/2} + sum_{j<=N} A_j^{1/2} xi_j A_j^{1/2}.
KMStep km_step(const KMApproximant& approx, Index n, const NumericContext& ctx = {});

/// sum_{j>N} V_j^* a V_j, the un-replaced tail of the base map.
CMatrix km_tail(const KMApproximant& approx, const AlgebraElement& a, Index n);

/// max over the test set of the operator-norm gap || phi(a) - psi(a) ||.
double bw_distance_on(const UcpMap& phi, const UcpMap& psi,
                      const std::vector<AlgebraElement>& test_set,
                      const NumericContext& ctx = {});

}  // namespace cstar
