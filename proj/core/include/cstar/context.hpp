#pragma once

#include <cstdint>

#include "cstar/errors.hpp"

namespace cstar {

/// Tolerance and determinism policy shared by every routine in the library.
///
/// eps_rank is a relative singular-value cutoff (against the largest singular
/// value) for all rank decisions; eps_eq is the relative Frobenius-residual
/// tolerance for operator equality checks; grid_size is the sample count for
/// circle-symbol positivity certification; rng_seed feeds every seeded
/// generator so runs are reproducible.
struct NumericContext {
  double eps_rank = 1e-10;
  double eps_eq = 1e-8;
  int grid_size = 4096;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(eps_rank > 0.0) || !(eps_eq > 0.0))
      raise(ErrorCode::InvalidContext, "tolerances must be strictly positive");
    if (grid_size < 16)
      raise(ErrorCode::InvalidContext, "grid_size must be at least 16");
  }
};

}  // namespace cstar
