#include "vsc/rates.hpp"

#include <cmath>
#include <numbers>

#include "vsc/errors.hpp"
#include "vsc/units.hpp"

namespace vsc {

std::string StateLabel::to_string() const {
  std::string s = electronic == Electronic::reactant ? "R," : "P,";
  return is_ground() ? s + "0" : s + "1_" + std::to_string(mode);
}

VibronicDressing make_dressing(const Eigensystem<double>& eig, double reactive_freq,
                               const ReactionParams& reaction) {
  if (eig.frequencies.minCoeff() <= 0.0)
    throw NumericalError("make_dressing: eigenmode frequencies must be positive");
  VibronicDressing d;
  d.reactive_freq = reactive_freq;
  const Eigen::ArrayXd ratio = reactive_freq / eig.frequencies.array();
  const Eigen::ArrayXd c_r = eig.coefficients.col(kReactiveColumn).array();
  d.displacement_reactant = (reaction.lambda_r * c_r * ratio).matrix();
  d.displacement_product = (reaction.lambda_p * c_r * ratio).matrix();
  auto shift = [&](double lambda_x, const Eigen::VectorXd& lambda_xq) {
    return lambda_x * lambda_x * reactive_freq -
           (lambda_xq.array().square() * eig.frequencies.array()).sum();
  };
  d.shift_reactant = shift(reaction.lambda_r, d.displacement_reactant);
  d.shift_product = shift(reaction.lambda_p, d.displacement_product);
  d.huang_rhys = (d.displacement_product - d.displacement_reactant).array().square().matrix();
  d.total_huang_rhys = d.huang_rhys.sum();
  return d;
}

double state_energy(const StateLabel& label, const VibronicDressing& dressing,
                    const Eigensystem<double>& eig, const ReactionParams& reaction) {
  const double base = label.electronic == Electronic::reactant ? reaction.e_reactant
                                                               : reaction.e_product;
  const double vib = label.is_ground() ? 0.0 : eig.frequencies[label.mode];
  return base + vib + dressing.shift(label.electronic);
}

double fc_factor(const VibronicDressing& dressing, int chi_reactant, int chi_product) {
  const double e_s = std::exp(-dressing.total_huang_rhys);
  const auto& s = dressing.huang_rhys;
  if (chi_reactant == kGroundMode && chi_product == kGroundMode) return e_s;
  if (chi_reactant == kGroundMode) return e_s * s[chi_product];
  if (chi_product == kGroundMode) return e_s * s[chi_reactant];
  if (chi_reactant == chi_product) {
    const double x = 1.0 - s[chi_reactant];
    return e_s * x * x;
  }
  return e_s * s[chi_reactant] * s[chi_product];
}

double mlj_prefactor(const ReactionParams& reaction) {
  const double beta = reaction.beta();
  const double a = std::sqrt(std::numbers::pi * beta / reaction.lambda_s) * reaction.j_rp *
                   reaction.j_rp;
  return units::wavenumber_to_rate(a);
}

double reactive_rate(const StateLabel& from, const StateLabel& to,
                     const VibronicDressing& dressing, const Eigensystem<double>& eig,
                     const ReactionParams& reaction, double prefactor) {
  if (from.electronic == to.electronic)
    throw DomainError("reactive_rate: " + from.to_string() + " -> " + to.to_string() +
                      " does not change electronic state");
  const bool forward = from.electronic == Electronic::reactant;
  const StateLabel& r = forward ? from : to;
  const StateLabel& p = forward ? to : from;
  const double f = fc_factor(dressing, r.mode, p.mode);
  if (f == 0.0 || prefactor == 0.0) return 0.0;
  const double beta = reaction.beta();
  const double e_r = state_energy(r, dressing, eig, reaction);
  const double e_p = state_energy(p, dressing, eig, reaction);
  double log_rate = std::log(prefactor * f) - beta * activation_energy(e_p - e_r, reaction.lambda_s);
  if (!forward) log_rate += beta * (e_p - e_r);
  return std::exp(log_rate);
}

double reactive_rate(const StateLabel& from, const StateLabel& to,
                     const VibronicDressing& dressing, const Eigensystem<double>& eig,
                     const ReactionParams& reaction) {
  return reactive_rate(from, to, dressing, eig, reaction, mlj_prefactor(reaction));
}

double decay_rate(const Eigensystem<double>& eig, Eigen::Index q, const ReactionParams& reaction) {
  return photon_fraction(eig, q) * reaction.kappa + molecular_weight(eig, q) * reaction.gamma;
}

double gain_rate(const Eigensystem<double>& eig, Eigen::Index q, const ReactionParams& reaction) {
  return decay_rate(eig, q, reaction) * std::exp(-reaction.beta() * eig.frequencies[q]);
}

double bath_spectral_density(double omega, const ReactionParams& reaction) {
  return reaction.eta * omega * std::exp(-omega / reaction.omega_cut);
}

double scattering_bracket(double omega, const ReactionParams& reaction) {
  const double beta = reaction.beta();
  if (std::abs(omega) < kScatteringDegeneracyTolerance) {
    // lim_{w->0} n(w) J(w) = eta / beta from both sides.
    return reaction.eta / beta;
  }
  if (omega > 0.0) return bath_spectral_density(omega, reaction) / std::expm1(beta * omega);
  const double w = -omega;
  return bath_spectral_density(w, reaction) / -std::expm1(-beta * w);
}

Eigen::MatrixXd scattering_overlaps(const Eigensystem<double>& eig) {
  const Eigen::MatrixXd w =
      eig.coefficients.rightCols(eig.n_molecules()).array().square().matrix();
  return w * w.transpose();
}

double scattering_rate(double overlap, double omega_initial, double omega_final,
                       const ReactionParams& reaction) {
  if (overlap == 0.0) return 0.0;
  const double bracket = scattering_bracket(omega_final - omega_initial, reaction);
  return units::wavenumber_to_rate(2.0 * std::numbers::pi * overlap * bracket);
}

double scattering_rate(const Eigensystem<double>& eig, Eigen::Index q, Eigen::Index q_final,
                       const ReactionParams& reaction) {
  if (q == q_final) throw DomainError("scattering_rate: initial and final modes coincide");
  const auto n = eig.n_molecules();
  const double overlap = (eig.coefficients.row(q).tail(n).array().square() *
                          eig.coefficients.row(q_final).tail(n).array().square())
                             .sum();
  return scattering_rate(overlap, eig.frequencies[q], eig.frequencies[q_final], reaction);
}

}  // namespace vsc
