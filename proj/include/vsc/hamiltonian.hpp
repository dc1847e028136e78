#pragma once

// Light-matter Hamiltonian of one cavity mode coupled to N disordered
// vibrations, its eigenmodes, and the eigenmode observables.
//
// Bare-mode ordering: column 0 is the cavity, column 1 is the reactive
// vibration, columns 2..N the remaining molecules. Eigenmodes are rows of the
// coefficient matrix, sorted by ascending frequency; rows 0 and N are the
// polaritons and rows 1..N-1 the dark modes.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsc/disorder.hpp"
#include "vsc/errors.hpp"
#include "vsc/params.hpp"

namespace vsc {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr Eigen::Index kCavityColumn = 0;
inline constexpr Eigen::Index kReactiveColumn = 1;

enum class ModeKind { polariton, dark };

template <typename Scalar = double>
struct Eigensystem {
  VectorX<Scalar> frequencies;   // ascending, cm^-1
  MatrixX<Scalar> coefficients;  // c(q, i): row q = eigenmode, column i = bare mode

  Eigen::Index size() const { return frequencies.size(); }
  Eigen::Index n_molecules() const { return size() - 1; }

  /// Polaritons are the two spectral extremes.
  ModeKind kind(Eigen::Index q) const {
    return (q == 0 || q == size() - 1) ? ModeKind::polariton : ModeKind::dark;
  }
  bool is_dark(Eigen::Index q) const { return kind(q) == ModeKind::dark; }
};

/// Arrowhead matrix: (0,0) = omega_c, (i,i) = mean + offset_i, (0,i) = (i,0) = g.
template <typename Scalar = double>
MatrixX<Scalar> build_hamiltonian(const EnsembleParams& params, const DisorderRealization& real) {
  const Eigen::Index n = params.n_molecules;
  if (real.offsets.size() != n)
    throw DomainError("build_hamiltonian: realization has " + std::to_string(real.offsets.size()) +
                      " offsets, expected " + std::to_string(n));
  const Scalar g = Scalar(params.coupling_per_molecule());
  MatrixX<Scalar> h = MatrixX<Scalar>::Zero(n + 1, n + 1);
  h(0, 0) = Scalar(params.cavity_freq());
  for (Eigen::Index i = 1; i <= n; ++i) {
    h(i, i) = Scalar(params.mean_vib_freq) + Scalar(real.offsets[i - 1]);
    h(0, i) = g;
    h(i, 0) = g;
  }
  return h;
}

/// Dense symmetric eigendecomposition. Each eigenvector's largest-magnitude
/// component is made non-negative so that coefficients are reproducible.
template <typename Derived>
Eigensystem<typename Derived::Scalar> diagonalize(const Eigen::MatrixBase<Derived>& h,
                                                  std::optional<std::uint64_t> realization = {}) {
  using Scalar = typename Derived::Scalar;
  if (h.rows() != h.cols() || h.rows() == 0)
    throw DomainError("diagonalize: matrix must be square and non-empty");
  if (!h.allFinite()) throw DomainError("diagonalize: non-finite matrix entry");
  const Scalar scale = h.cwiseAbs().maxCoeff();
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
    throw DomainError("diagonalize: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver did not converge", realization);

  Eigensystem<Scalar> eig;
  eig.frequencies = solver.eigenvalues();
  eig.coefficients = solver.eigenvectors().transpose();
  for (Eigen::Index q = 0; q < eig.size(); ++q) {
    Eigen::Index arg = 0;
    eig.coefficients.row(q).cwiseAbs().maxCoeff(&arg);
    if (eig.coefficients(q, arg) < Scalar(0)) eig.coefficients.row(q) *= Scalar(-1);
  }
  return eig;
}

namespace detail {
template <typename Scalar>
void check_mode(const Eigensystem<Scalar>& eig, Eigen::Index q) {
  if (q < 0 || q >= eig.size()) throw std::out_of_range("eigenmode index out of range");
}
}  // namespace detail

/// |c_q0|^2
template <typename Scalar>
Scalar photon_fraction(const Eigensystem<Scalar>& eig, Eigen::Index q) {
  detail::check_mode(eig, q);
  const Scalar c = eig.coefficients(q, kCavityColumn);
  return c * c;
}

/// Total weight of eigenmode q on the molecular (non-cavity) bare modes.
template <typename Scalar>
Scalar molecular_weight(const Eigensystem<Scalar>& eig, Eigen::Index q) {
  detail::check_mode(eig, q);
  return eig.coefficients.row(q).tail(eig.n_molecules()).squaredNorm();
}

/// Number of molecules an eigenmode is spread over: inverse sum of squared
/// normalized molecular weights.
template <typename Scalar>
Scalar molecular_pr(const Eigensystem<Scalar>& eig, Eigen::Index q) {
  const Scalar weight = molecular_weight(eig, q);
  if (!(weight > Scalar(1e-14)))
    throw DomainError("molecular_pr: eigenmode " + std::to_string(q) +
                      " has no molecular weight");
  const auto normalized = eig.coefficients.row(q).tail(eig.n_molecules()).array().square() / weight;
  return Scalar(1) / normalized.square().sum();
}

/// Participation ratio of the reactive vibration in the eigenmode basis.
template <typename Scalar>
Scalar reactive_mode_delocalization(const Eigensystem<Scalar>& eig) {
  return Scalar(1) / eig.coefficients.col(kReactiveColumn).array().pow(4).sum();
}

/// Mean molecular PR over the dark modes; empty when N < 2.
template <typename Scalar>
std::optional<Scalar> mean_dark_mode_pr(const Eigensystem<Scalar>& eig) {
  if (eig.size() < 3) return std::nullopt;
  Scalar sum(0);
  for (Eigen::Index q = 1; q + 1 < eig.size(); ++q) sum += molecular_pr(eig, q);
  return sum / Scalar(eig.size() - 2);
}

/// Diagnostic only: modes whose photon fraction exceeds `threshold`.
template <typename Scalar>
std::vector<Eigen::Index> photonic_modes(const Eigensystem<Scalar>& eig, Scalar threshold) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index q = 0; q < eig.size(); ++q)
    if (photon_fraction(eig, q) > threshold) out.push_back(q);
  return out;
}

/// Eigenmode frequencies of the zero-disorder system: mean + detuning/2 +- sqrt(g^2 N + detuning^2/4).
inline std::pair<double, double> ideal_polariton_frequencies(const EnsembleParams& p) {
  const double half = 0.5 * p.detuning;
  const double split = std::sqrt(p.collective_coupling * p.collective_coupling + half * half);
  return {p.mean_vib_freq + half - split, p.mean_vib_freq + half + split};
}

}  // namespace vsc
