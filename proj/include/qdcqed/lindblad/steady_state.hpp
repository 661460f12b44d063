#pragma once

#include <fmt/format.h>
#include <Eigen/LU>

#include "qdcqed/lindblad/liouvillian.hpp"

namespace qdcqed::lindblad {

struct SteadyStateResult {
  DensityMatrix rho;
  double residual;  ///< max |L(rho)| entry
};

/// Solves L(rho) = 0 with Tr rho = 1 through the bordered system
///   [ L    w* ] [ x ]   [ 0 ]
///   [ w^T  0  ] [ l ] = [ 1 ]
/// where w = vec(I) is the trace functional. The bordered matrix is invertible
/// exactly when the stationary state is unique.
inline SteadyStateResult steady_state_with_residual(const HilbertConfig& h, const SystemParams& p) {
  validate(h);
  check_lindblad_params(p);
  const Matrix L = liouvillian(build_operators(h), p);
  const int dim = h.dimension();
  const Eigen::Index n = L.rows();

  const Vector w = vectorize(Matrix::Identity(dim, dim));
  Matrix B = Matrix::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = L;
  B.topRightCorner(n, 1) = w.conjugate();
  B.bottomLeftCorner(1, n) = w.transpose();
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;

  Eigen::FullPivLU<Matrix> lu(B);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw SingularSystemError(fmt::format(
        "stationary state is not unique (bordered system rank {} of {})", lu.rank(), n + 1));
  }
  const Vector sol = lu.solve(rhs);
  Matrix rho = unvectorize(sol.head(n), dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();

  const double residual = (L * vectorize(rho)).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw SingularSystemError(
        fmt::format("steady state residual {:.3e} exceeds 1e-10 (ill-conditioned)", residual));
  }
  DensityMatrix out(h, std::move(rho));
  out.check();
  return {std::move(out), residual};
}

inline DensityMatrix steady_state(const HilbertConfig& h, const SystemParams& p) {
  return steady_state_with_residual(h, p).rho;
}

}  // namespace qdcqed::lindblad
