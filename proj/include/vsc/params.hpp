#pragma once

#include <cmath>

namespace vsc {

/// One cavity plus N disordered molecular vibrations. Detuning is the
/// canonical input; the cavity frequency is derived from it.
struct EnsembleParams {
  int n_molecules = 256;
  double mean_vib_freq = 2000.0;       // cm^-1
  double disorder_sigma = 10.0;        // cm^-1
  double detuning = 0.0;               // cm^-1, omega_c - mean_vib_freq
  double collective_coupling = 80.0;   // cm^-1, g*sqrt(N)

  double cavity_freq() const { return mean_vib_freq + detuning; }
  double coupling_per_molecule() const {
    return collective_coupling / std::sqrt(static_cast<double>(n_molecules));
  }

  /// Throws ParameterError naming the first field that violates its invariant.
  void validate() const;
};

/// Electron-transfer and relaxation parameters for the reactive molecule.
struct ReactionParams {
  double e_reactant = 0.0;     // cm^-1
  double e_product = -1200.0;  // cm^-1
  double lambda_r = 0.0;       // dimensionless vibronic coupling
  double lambda_p = 1.5;
  double j_rp = 20.0;          // cm^-1
  double lambda_s = 160.0;     // cm^-1, solvent reorganization energy
  double temperature = 298.0;  // K
  double kappa = 1.0;          // ps^-1, bare cavity leakage
  double gamma = 0.01;         // ps^-1, bare vibrational decay
  double eta = 2.0e-3;         // dimensionless bath coupling
  double omega_cut = 50.0;     // cm^-1

  double beta() const;
  void validate() const;
};

struct ModelParams {
  EnsembleParams ensemble;
  ReactionParams reaction;
};

/// Literature defaults: mean frequency 2000 cm^-1, sigma 10 cm^-1, g*sqrt(N) = 8 sigma,
/// resonant cavity, and the electron-transfer/relaxation set scaled by the mean frequency.
ModelParams default_params();

}  // namespace vsc
