#include "vsc/params.hpp"

#include <string>

#include "vsc/errors.hpp"
#include "vsc/units.hpp"

namespace vsc {
namespace {

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ParameterError(field, message);
}

void require_finite(double value, const char* field) {
  require(std::isfinite(value), field, "must be finite");
}

}  // namespace

void EnsembleParams::validate() const {
  require(n_molecules >= 1, "n_molecules", "must be at least 1");
  require_finite(mean_vib_freq, "mean_vib_freq");
  require(mean_vib_freq > 0.0, "mean_vib_freq", "must be positive");
  require_finite(disorder_sigma, "disorder_sigma");
  require(disorder_sigma >= 0.0, "disorder_sigma", "must be non-negative");
  // Sampled frequencies stay positive far into the Gaussian tails.
  require(disorder_sigma < mean_vib_freq / 10.0, "disorder_sigma",
          "must be below mean_vib_freq/10");
  require_finite(detuning, "detuning");
  require(cavity_freq() > 0.0, "detuning", "cavity frequency mean_vib_freq+detuning must be positive");
  require_finite(collective_coupling, "collective_coupling");
  require(collective_coupling >= 0.0, "collective_coupling", "must be non-negative");
}

double ReactionParams::beta() const { return units::thermal_beta(temperature); }

void ReactionParams::validate() const {
  require_finite(e_reactant, "e_reactant");
  require_finite(e_product, "e_product");
  require_finite(lambda_r, "lambda_r");
  require_finite(lambda_p, "lambda_p");
  require_finite(j_rp, "j_rp");
  require(std::isfinite(lambda_s) && lambda_s > 0.0, "lambda_s", "must be positive");
  require(std::isfinite(temperature) && temperature > 0.0, "temperature", "must be positive");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa", "must be non-negative");
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "must be non-negative");
  require(std::isfinite(eta) && eta >= 0.0, "eta", "must be non-negative");
  require(std::isfinite(omega_cut) && omega_cut > 0.0, "omega_cut", "must be positive");
}

ModelParams default_params() {
  ModelParams p;
  EnsembleParams& e = p.ensemble;
  e.n_molecules = 256;
  e.mean_vib_freq = 2000.0;
  e.disorder_sigma = 10.0;
  e.detuning = 0.0;
  e.collective_coupling = 8.0 * e.disorder_sigma;

  const double w = e.mean_vib_freq;
  ReactionParams& r = p.reaction;
  r.e_reactant = 0.0;
  r.e_product = -0.6 * w;
  r.lambda_r = 0.0;
  r.lambda_p = 1.5;
  r.j_rp = 0.01 * w;
  r.lambda_s = 0.08 * w;
  r.temperature = 298.0;
  r.kappa = 1.0;
  r.gamma = 0.01;
  r.eta = 2.0e-3;
  r.omega_cut = 50.0;
  return p;
}

}  // namespace vsc
