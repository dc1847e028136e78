#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsc/hamiltonian.hpp"
#include "vsc/rates.hpp"

namespace vsc {

/// Generator of dp/dt = A p over the 2(N+2) states {(X,0), (X,1_q)}.
/// A(j,i) is the rate i -> j; each diagonal closes its column to zero.
struct RateMatrix {
  std::vector<StateLabel> labels;
  Eigen::MatrixXd generator;  // ps^-1
  Eigen::VectorXd energies;   // cm^-1

  Eigen::Index size() const { return generator.rows(); }
  /// Layout: reactant block [(R,0), (R,1_0), ...], then the product block.
  static Eigen::Index index_of(const StateLabel& label, Eigen::Index n_modes);
};

enum class TransitionClass { reactive, decay, gain, scatter };
const char* to_string(TransitionClass c);
TransitionClass classify_transition(const StateLabel& from, const StateLabel& to);

RateMatrix assemble_rate_matrix(const Eigensystem<double>& eig, const VibronicDressing& dressing,
                                const ReactionParams& reaction);

/// Normalized Boltzmann weights; the minimum energy is subtracted first.
/// At infinite beta the weight is shared equally among the lowest-energy states.
Eigen::VectorXd boltzmann_weights(const Eigen::VectorXd& energies, double beta);

/// Thermal distribution over the reactant states; product states start empty.
Eigen::VectorXd thermal_initial_population(const RateMatrix& rates, double beta);

struct Trajectory {
  std::vector<double> times;        // ps
  Eigen::MatrixXd populations;      // state x time
  Eigen::VectorXd reactant_population;
};

/// t_j = j * step for j = 0..n_steps.
std::vector<double> uniform_time_grid(double step_ps, int n_steps);

/// Spectral propagator exp(A t) through the symmetrized generator
/// B = M A M^-1, M = diag(f^-1/2), which is symmetric under detailed balance.
class SpectralPropagator {
 public:
  SpectralPropagator(const RateMatrix& rates, double beta, double symmetry_tolerance = 1e-8);

  Eigen::VectorXd evaluate(const Eigen::VectorXd& p0, double t) const;
  Trajectory propagate(const Eigen::VectorXd& p0, std::span<const double> times) const;

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::VectorXd& equilibrium() const { return equilibrium_; }
  /// Largest relative asymmetry |B_ij - B_ji| / max(|B_ij|, |B_ji|) seen before symmetrizing.
  double symmetry_defect() const { return symmetry_defect_; }

 private:
  std::vector<StateLabel> labels_;
  Eigen::VectorXd sqrt_f_;
  Eigen::VectorXd equilibrium_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd modes_;
  double symmetry_defect_ = 0.0;
};

Trajectory propagate(const RateMatrix& rates, const Eigen::VectorXd& p0,
                     std::span<const double> times, double beta);

struct RateFit {
  double rate = 0.0;  // ps^-1
  double r2_adjusted = 0.0;
  std::optional<std::string> warning;
};

/// Least-squares fit of p_R(t) to exp(-k t) over the scalar k.
RateFit fit_rate(std::span<const double> times, std::span<const double> reactant_population);
RateFit fit_rate(const Trajectory& trajectory);

}  // namespace vsc
