#include "cstar/random.hpp"

#include <cmath>

#include <Eigen/QR>

namespace cstar {

Index Rng::uniform_index(Index lo, Index hi) {
  std::uniform_int_distribution<Index> dist(lo, hi);
  return dist(engine_);
}

CMatrix Rng::ginibre(Index rows, Index cols) {
  CMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      out(i, j) = Complex(gaussian(), gaussian()) / std::sqrt(2.0);
  return out;
}

CMatrix Rng::unitary(Index n) {
  CMatrix g = ginibre(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    Complex d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

CMatrix Rng::isometry(Index rows, Index cols) {
  if (cols > rows)
    raise(ErrorCode::ShapeMismatch, "isometry: more columns than rows");
  return unitary(rows).leftCols(cols);
}

CMatrix Rng::hermitian(Index n) {
  CMatrix g = ginibre(n, n);
  return 0.5 * (g + g.adjoint());
}

CMatrix Rng::positive_definite(Index n, double cond) {
  CMatrix u = unitary(n);
  Eigen::VectorXd ev(n);
  double log_cond = std::log(cond);
  ev(0) = 1.0;
  for (Index i = 1; i < n; ++i) ev(i) = std::exp(-uniform(0.0, log_cond));
  return u * ev.asDiagonal() * u.adjoint();
}

CMatrix Rng::positive_with_spectrum(Index n, double lo, double hi) {
  CMatrix u = unitary(n);
  Eigen::VectorXd ev(n);
  for (Index i = 0; i < n; ++i) ev(i) = uniform(lo, hi);
  return u * ev.asDiagonal() * u.adjoint();
}

Subspace Rng::subspace(Index ambient_dim, Index dim) {
  return Subspace{ambient_dim, isometry(ambient_dim, dim)};
}

}  // namespace cstar
