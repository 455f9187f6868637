#pragma once

#include <random>

#include "cstar/numerics.hpp"

namespace cstar {

/// Seeded source for all randomized constructions. Instances are cheap;
/// derive one per task from NumericContext::rng_seed plus a salt so
/// independent test streams do not interact.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * unit_(engine_);
  }
  Index uniform_index(Index lo, Index hi);  // inclusive bounds

  /// Entries i.i.d. standard complex Gaussian.
  CMatrix ginibre(Index rows, Index cols);
  /// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
  CMatrix unitary(Index n);
  /// Isometry: n x k with orthonormal columns, k <= n.
  CMatrix isometry(Index rows, Index cols);
  /// Hermitian with i.i.d. Gaussian entries (GUE-style).
  CMatrix hermitian(Index n);
  /// Positive definite with eigenvalues in [1/cond, 1], log-uniform.
  CMatrix positive_definite(Index n, double cond);
  /// PSD with spectrum inside [lo, hi] (uniform eigenvalues).
  CMatrix positive_with_spectrum(Index n, double lo, double hi);
  Subspace subspace(Index ambient_dim, Index dim);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace cstar
