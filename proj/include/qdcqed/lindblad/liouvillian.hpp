#pragma once

// Superoperators in the column-stacking convention: vec(A X B) = (B^T (x) A) vec(X).
// Eigen matrices are column-major, so a Map over rho's storage is vec(rho).

#include "qdcqed/lindblad/operators.hpp"

namespace qdcqed::lindblad {

/// X -> A X
inline Matrix spre(const Matrix& A) {
  return kron(Matrix::Identity(A.rows(), A.cols()), A);
}

/// X -> X B
inline Matrix spost(const Matrix& B) {
  return kron(B.transpose(), Matrix::Identity(B.rows(), B.cols()));
}

/// X -> A X B
inline Matrix sprepost(const Matrix& A, const Matrix& B) { return kron(B.transpose(), A); }

/// X -> c X c^dagger - (c^dagger c X + X c^dagger c) / 2
inline Matrix lindblad_dissipator(const Matrix& c) {
  const Matrix cdc = c.adjoint() * c;
  return sprepost(c, c.adjoint()) - 0.5 * spre(cdc) - 0.5 * spost(cdc);
}

inline Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix unvectorize(const Vector& v, int dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

/// Generator of
///   d rho/dt = -i [H, rho] + gamma D[sigma-] + kappa D[a]
///              + (gamma*/4) (sigma_z rho sigma_z - rho) + P D[sigma+]
/// where kappa = kappa_in + kappa_out.
inline Matrix liouvillian(const OperatorSet& ops, const SystemParams& p) {
  check_lindblad_params(p);
  const Matrix H = hamiltonian(ops, p);
  const Complex minus_i(0.0, -1.0);
  const auto n2 = ops.identity.size();

  Matrix L = minus_i * (spre(H) - spost(H));
  if (p.gamma != 0.0) L += p.gamma * lindblad_dissipator(ops.sigma_minus);
  if (p.kappa() != 0.0) L += p.kappa() * lindblad_dissipator(ops.a);
  if (p.gamma_star != 0.0) {
    L += (p.gamma_star / 4.0) *
         (sprepost(ops.sigma_z, ops.sigma_z) - Matrix::Identity(n2, n2));
  }
  if (p.pump != 0.0) L += p.pump * lindblad_dissipator(ops.sigma_plus);
  return L;
}

inline Matrix liouvillian(const HilbertConfig& h, const SystemParams& p) {
  return liouvillian(build_operators(h), p);
}

/// L(rho) as a matrix, for checks on individual states.
inline Matrix apply_liouvillian(const Matrix& L, const Matrix& rho) {
  return unvectorize(L * vectorize(rho), static_cast<int>(rho.rows()));
}

}  // namespace qdcqed::lindblad
