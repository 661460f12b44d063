#pragma once

// Truncated QD (x) Fock space and the density-matrix value type.
// Basis ordering |s> (x) |n>, s in {g = 0, e = 1}, n in {0..n_max}:
//   index = s * (n_max + 1) + n

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qdcqed/errors.hpp"

namespace qdcqed::lindblad {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class QdState : int { ground = 0, excited = 1 };

struct HilbertConfig {
  int n_max = 5;

  constexpr int fock_levels() const noexcept { return n_max + 1; }
  constexpr int dimension() const noexcept { return 2 * fock_levels(); }
  constexpr int index(QdState s, int n) const noexcept {
    return static_cast<int>(s) * fock_levels() + n;
  }

  friend bool operator==(const HilbertConfig&, const HilbertConfig&) = default;
};

inline HilbertConfig validate(const HilbertConfig& h) {
  if (h.n_max < 1) {
    throw ParamError("n_max", fmt::format("photon truncation n_max must be >= 1, got {}", h.n_max));
  }
  return h;
}

/// Tolerances a physical state must satisfy.
struct DensityTolerances {
  static constexpr double hermiticity = 1e-10;
  static constexpr double trace = 1e-8;
  static constexpr double min_eigenvalue = -1e-8;
};

struct StateDiagnostics {
  double trace_error = 0.0;         ///< |Tr rho - 1|
  double hermiticity_defect = 0.0;  ///< max |rho - rho^dagger| entry
  double min_eigenvalue = 0.0;      ///< of the Hermitian part

  bool physical() const noexcept {
    return trace_error <= DensityTolerances::trace &&
           hermiticity_defect <= DensityTolerances::hermiticity &&
           min_eigenvalue >= DensityTolerances::min_eigenvalue;
  }
};

class DensityMatrix {
 public:
  DensityMatrix(HilbertConfig cfg, Matrix rho) : cfg_(validate(cfg)), rho_(std::move(rho)) {
    if (rho_.rows() != cfg_.dimension() || rho_.cols() != cfg_.dimension()) {
      throw ParamError("rho", fmt::format("density matrix is {}x{}, expected {}x{}", rho_.rows(),
                                          rho_.cols(), cfg_.dimension(), cfg_.dimension()));
    }
  }

  /// |s, n><s, n|
  static DensityMatrix basis_state(HilbertConfig cfg, QdState s, int n) {
    validate(cfg);
    if (n < 0 || n > cfg.n_max) {
      throw ParamError("n", fmt::format("Fock index {} outside [0, {}]", n, cfg.n_max));
    }
    Matrix rho = Matrix::Zero(cfg.dimension(), cfg.dimension());
    const int i = cfg.index(s, n);
    rho(i, i) = 1.0;
    return {cfg, std::move(rho)};
  }

  /// Diagonal state with the given populations in basis order.
  static DensityMatrix from_populations(HilbertConfig cfg, std::span<const double> populations) {
    validate(cfg);
    if (static_cast<int>(populations.size()) != cfg.dimension()) {
      throw ParamError("populations", fmt::format("expected {} populations, got {}",
                                                  cfg.dimension(), populations.size()));
    }
    Matrix rho = Matrix::Zero(cfg.dimension(), cfg.dimension());
    for (int i = 0; i < cfg.dimension(); ++i) {
      if (populations[i] < 0.0) {
        throw ParamError("populations", "populations must be non-negative");
      }
      rho(i, i) = populations[i];
    }
    return {cfg, std::move(rho)};
  }

  const HilbertConfig& config() const noexcept { return cfg_; }
  const Matrix& matrix() const noexcept { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }

  StateDiagnostics diagnostics() const {
    StateDiagnostics d;
    d.trace_error = std::abs(rho_.trace() - Complex(1.0, 0.0));
    d.hermiticity_defect = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
  }

  /// Throws ParamError describing the first broken invariant.
  const DensityMatrix& check() const {
    const auto d = diagnostics();
    if (d.hermiticity_defect > DensityTolerances::hermiticity) {
      throw ParamError("rho", fmt::format("density matrix not Hermitian (defect {:.3e})",
                                          d.hermiticity_defect));
    }
    if (d.trace_error > DensityTolerances::trace) {
      throw ParamError("rho", fmt::format("density matrix trace off by {:.3e}", d.trace_error));
    }
    if (d.min_eigenvalue < DensityTolerances::min_eigenvalue) {
      throw ParamError("rho", fmt::format("density matrix has negative eigenvalue {:.3e}",
                                          d.min_eigenvalue));
    }
    return *this;
  }

 private:
  HilbertConfig cfg_;
  Matrix rho_;
};

}  // namespace qdcqed::lindblad
