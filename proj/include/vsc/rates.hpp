#pragma once

// Microscopic rates of the kinetic model. States are (X, chi) with X the
// electronic state and chi either the vibrational-cavity ground state or a
// single excitation in eigenmode q (0-based, ascending frequency).

#include <compare>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "vsc/hamiltonian.hpp"
#include "vsc/params.hpp"

namespace vsc {

enum class Electronic : std::uint8_t { reactant = 0, product = 1 };

inline constexpr int kGroundMode = -1;

struct StateLabel {
  Electronic electronic = Electronic::reactant;
  int mode = kGroundMode;  // kGroundMode for chi = 0, otherwise q of chi = 1_q

  static constexpr StateLabel ground(Electronic x) { return {x, kGroundMode}; }
  static constexpr StateLabel excited(Electronic x, int q) { return {x, q}; }

  bool is_ground() const { return mode == kGroundMode; }
  /// "R,0" or "P,1_q".
  std::string to_string() const;

  auto operator<=>(const StateLabel&) const = default;
};

/// Equilibrium displacements of every eigenmode in each electronic state and the
/// resulting reorganization-energy shifts and Huang-Rhys factors.
struct VibronicDressing {
  Eigen::VectorXd displacement_reactant;  // lambda_Rq
  Eigen::VectorXd displacement_product;   // lambda_Pq
  double shift_reactant = 0.0;            // Delta_R, cm^-1
  double shift_product = 0.0;             // Delta_P, cm^-1
  Eigen::VectorXd huang_rhys;             // S_q = (lambda_Pq - lambda_Rq)^2
  double total_huang_rhys = 0.0;          // S
  double reactive_freq = 0.0;             // omega_r, cm^-1

  double shift(Electronic x) const {
    return x == Electronic::reactant ? shift_reactant : shift_product;
  }
};

/// lambda_Xq = lambda_X c_qr omega_r / omega_q and
/// Delta_X = lambda_X^2 omega_r - sum_q lambda_Xq^2 omega_q.
VibronicDressing make_dressing(const Eigensystem<double>& eig, double reactive_freq,
                               const ReactionParams& reaction);

double state_energy(const StateLabel& label, const VibronicDressing& dressing,
                    const Eigensystem<double>& eig, const ReactionParams& reaction);

/// Franck-Condon factor between reactant vibrational state `chi_reactant` and product
/// state `chi_product` (kGroundMode or a mode index), within the one-excitation space.
double fc_factor(const VibronicDressing& dressing, int chi_reactant, int chi_product);

/// sqrt(pi beta / lambda_s) |J_RP|^2 / hbar, in ps^-1.
double mlj_prefactor(const ReactionParams& reaction);

/// Marcus activation energy for a reactant-to-product gap `gap` = E_P' - E_R.
inline double activation_energy(double gap, double lambda_s) {
  const double x = gap + lambda_s;
  return x * x / (4.0 * lambda_s);
}

/// Rate of a reactive transition. Forward (R -> P) uses the MLJ expression;
/// backward follows from detailed balance with the state energies.
double reactive_rate(const StateLabel& from, const StateLabel& to,
                     const VibronicDressing& dressing, const Eigensystem<double>& eig,
                     const ReactionParams& reaction, double prefactor);
double reactive_rate(const StateLabel& from, const StateLabel& to,
                     const VibronicDressing& dressing, const Eigensystem<double>& eig,
                     const ReactionParams& reaction);

/// (X,1_q) -> (X,0): |c_q0|^2 kappa + (sum_i>=1 |c_qi|^2) gamma.
double decay_rate(const Eigensystem<double>& eig, Eigen::Index q, const ReactionParams& reaction);
/// (X,0) -> (X,1_q): decay * exp(-beta omega_q).
double gain_rate(const Eigensystem<double>& eig, Eigen::Index q, const ReactionParams& reaction);

/// Below this gap (cm^-1) the scattering bracket takes its analytic zero-gap limit.
inline constexpr double kScatteringDegeneracyTolerance = 1e-6;

/// J(w) = eta w exp(-w / omega_cut), cm^-1.
double bath_spectral_density(double omega, const ReactionParams& reaction);

/// Thermal bracket of the scattering rate for gap omega = omega_final - omega_initial, cm^-1:
/// (n(|w|)+1) J(|w|) downhill, n(w) J(w) uphill, eta k_B T at zero gap.
double scattering_bracket(double omega, const ReactionParams& reaction);

/// Matrix of molecular overlaps sum_{i>=1} |c_qi|^2 |c_q'i|^2.
Eigen::MatrixXd scattering_overlaps(const Eigensystem<double>& eig);

/// (X,1_q) -> (X,1_q'), ps^-1.
double scattering_rate(const Eigensystem<double>& eig, Eigen::Index q, Eigen::Index q_final,
                       const ReactionParams& reaction);
double scattering_rate(double overlap, double omega_initial, double omega_final,
                       const ReactionParams& reaction);

}  // namespace vsc
