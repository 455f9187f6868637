#pragma once

#include <doctest.h>

#include <cstar/algebras.hpp>
#include <cstar/numerics.hpp>
#include <cstar/random.hpp>

namespace testing {

using cstar::CMatrix;
using cstar::Complex;
using cstar::CVector;
using cstar::Index;

inline CMatrix cmat(Index rows, Index cols, std::initializer_list<double> re) {
  CMatrix out(rows, cols);
  auto it = re.begin();
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = *it++;
  return out;
}

inline CMatrix cdiag(std::initializer_list<double> entries) {
  CMatrix out = CMatrix::Zero(static_cast<Index>(entries.size()),
                              static_cast<Index>(entries.size()));
  Index i = 0;
  for (double v : entries) out(i, i) = v, ++i;
  return out;
}

inline CVector unit_vector(Index dim, Index k) {
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return v;
}

inline cstar::Subspace coord_span(Index ambient, std::initializer_list<Index> coords) {
  CMatrix basis = CMatrix::Zero(ambient, static_cast<Index>(coords.size()));
  Index col = 0;
  for (Index k : coords) basis(k, col++) = 1.0;
  return cstar::Subspace{ambient, basis};
}

#define CHECK_CLOSE(a, b, tol) CHECK(cstar::rel_residual((a), (b)) <= (tol))

}  // namespace testing
