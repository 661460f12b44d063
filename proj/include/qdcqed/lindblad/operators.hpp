#pragma once

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "qdcqed/lindblad/hilbert.hpp"
#include "qdcqed/params.hpp"

namespace qdcqed::lindblad {

struct OperatorSet {
  HilbertConfig config;
  Matrix sigma_minus;
  Matrix sigma_plus;
  Matrix sigma_z;
  Matrix a;
  Matrix a_dagger;
  Matrix identity;

  Matrix qd_number() const { return sigma_plus * sigma_minus; }
  Matrix photon_number() const { return a_dagger * a; }
};

inline Matrix kron(const Matrix& A, const Matrix& B) { return Eigen::kroneckerProduct(A, B).eval(); }

/// Emitter operators act on the first tensor factor, the cavity mode on the second.
inline OperatorSet build_operators(const HilbertConfig& h) {
  validate(h);
  const int nf = h.fock_levels();

  Matrix sm2 = Matrix::Zero(2, 2);
  sm2(0, 1) = 1.0;  // |g><e|
  Matrix a_f = Matrix::Zero(nf, nf);
  for (int n = 1; n < nf; ++n) a_f(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Matrix id2 = Matrix::Identity(2, 2);
  const Matrix idf = Matrix::Identity(nf, nf);

  OperatorSet ops;
  ops.config = h;
  ops.sigma_minus = kron(sm2, idf);
  ops.sigma_plus = ops.sigma_minus.adjoint();
  ops.sigma_z = ops.sigma_plus * ops.sigma_minus - ops.sigma_minus * ops.sigma_plus;
  ops.a = kron(id2, a_f);
  ops.a_dagger = ops.a.adjoint();
  ops.identity = Matrix::Identity(h.dimension(), h.dimension());
  return ops;
}

/// Rejects negative or non-finite rates. Unlike qdcqed::validate, zero gamma
/// and zero kappa are allowed here (closed-system runs).
inline SystemParams check_lindblad_params(const SystemParams& p) {
  detail::require_non_negative(p.g, "g");
  detail::require_non_negative(p.gamma, "gamma");
  detail::require_non_negative(p.gamma_star, "gamma_star");
  detail::require_non_negative(p.kappa_in, "kappa_in");
  detail::require_non_negative(p.kappa_out, "kappa_out");
  detail::require_non_negative(p.pump, "pump");
  if (!std::isfinite(p.delta)) throw ParamError("delta", "delta must be finite");
  return p;
}

/// H = delta sigma+ sigma- + i g (a^dagger sigma- - sigma+ a), in the frame rotating
/// at the cavity frequency.
inline Matrix hamiltonian(const OperatorSet& ops, const SystemParams& p) {
  check_lindblad_params(p);
  const Complex ig(0.0, p.g);
  return p.delta * ops.qd_number() +
         ig * (ops.a_dagger * ops.sigma_minus - ops.sigma_plus * ops.a);
}

inline Matrix hamiltonian(const HilbertConfig& h, const SystemParams& p) {
  return hamiltonian(build_operators(h), p);
}

}  // namespace qdcqed::lindblad
