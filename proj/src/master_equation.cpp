#include "vsc/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vsc/errors.hpp"

namespace vsc {

namespace {

// exp(lambda t), flushed to zero well before the subnormal range: subnormal
// operands slow the mode recombination by orders of magnitude.
Eigen::VectorXd relaxation_factors(const Eigen::VectorXd& eigenvalues, double t) {
  return (eigenvalues.array() * t)
      .unaryExpr([](double x) { return x < -700.0 ? 0.0 : std::exp(x); })
      .matrix();
}

}  // namespace

Eigen::Index RateMatrix::index_of(const StateLabel& label, Eigen::Index n_modes) {
  const Eigen::Index block = n_modes + 1;
  const Eigen::Index base = label.electronic == Electronic::reactant ? 0 : block;
  return base + (label.is_ground() ? 0 : label.mode + 1);
}

const char* to_string(TransitionClass c) {
  switch (c) {
    case TransitionClass::reactive: return "reactive";
    case TransitionClass::decay: return "decay";
    case TransitionClass::gain: return "gain";
    case TransitionClass::scatter: return "scatter";
  }
  return "unknown";
}

TransitionClass classify_transition(const StateLabel& from, const StateLabel& to) {
  if (from.electronic != to.electronic) return TransitionClass::reactive;
  if (to.is_ground()) return TransitionClass::decay;
  if (from.is_ground()) return TransitionClass::gain;
  return TransitionClass::scatter;
}

RateMatrix assemble_rate_matrix(const Eigensystem<double>& eig, const VibronicDressing& dressing,
                                const ReactionParams& reaction) {
  const Eigen::Index n_modes = eig.size();
  const Eigen::Index block = n_modes + 1;
  const Eigen::Index n = 2 * block;

  RateMatrix out;
  out.labels.reserve(n);
  for (Electronic x : {Electronic::reactant, Electronic::product}) {
    out.labels.push_back(StateLabel::ground(x));
    for (Eigen::Index q = 0; q < n_modes; ++q)
      out.labels.push_back(StateLabel::excited(x, static_cast<int>(q)));
  }
  out.energies.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.energies[i] = state_energy(out.labels[i], dressing, eig, reaction);

  Eigen::MatrixXd& a = out.generator;
  a = Eigen::MatrixXd::Zero(n, n);

  const double prefactor = mlj_prefactor(reaction);
  for (Eigen::Index i = 0; i < block; ++i) {
    for (Eigen::Index j = block; j < n; ++j) {
      const StateLabel& r = out.labels[i];
      const StateLabel& p = out.labels[j];
      a(j, i) = reactive_rate(r, p, dressing, eig, reaction, prefactor);
      a(i, j) = reactive_rate(p, r, dressing, eig, reaction, prefactor);
    }
  }

  const Eigen::MatrixXd overlap = scattering_overlaps(eig);
  for (Eigen::Index x = 0; x < 2; ++x) {
    const Eigen::Index ground = x * block;
    for (Eigen::Index q = 0; q < n_modes; ++q) {
      const Eigen::Index e = ground + 1 + q;
      a(ground, e) = decay_rate(eig, q, reaction);
      a(e, ground) = gain_rate(eig, q, reaction);
    }
    for (Eigen::Index q = 0; q < n_modes; ++q) {
      for (Eigen::Index qf = q + 1; qf < n_modes; ++qf) {
        // One triangle of the overlap keeps both directions on the same value.
        const double ov = overlap(q, qf);
        const double wq = eig.frequencies[q], wf = eig.frequencies[qf];
        a(ground + 1 + qf, ground + 1 + q) = scattering_rate(ov, wq, wf, reaction);
        a(ground + 1 + q, ground + 1 + qf) = scattering_rate(ov, wf, wq, reaction);
      }
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double k = a(j, i);
      if (!(k >= 0.0) || !std::isfinite(k))
        throw NumericalError("invalid rate " + std::to_string(k) + " for transition " +
                             out.labels[i].to_string() + " -> " + out.labels[j].to_string());
    }
    a(i, i) = -a.col(i).sum();
  }
  return out;
}

Eigen::VectorXd boltzmann_weights(const Eigen::VectorXd& energies, double beta) {
  const double e_min = energies.minCoeff();
  Eigen::VectorXd w(energies.size());
  if (std::isinf(beta)) {
    w = (energies.array() == e_min).cast<double>().matrix();
  } else {
    w = (-beta * (energies.array() - e_min)).exp().matrix();
  }
  return w / w.sum();
}

Eigen::VectorXd thermal_initial_population(const RateMatrix& rates, double beta) {
  std::vector<Eigen::Index> reactant;
  for (Eigen::Index i = 0; i < rates.size(); ++i)
    if (rates.labels[i].electronic == Electronic::reactant) reactant.push_back(i);
  if (reactant.empty()) throw DomainError("thermal_initial_population: no reactant states");

  Eigen::VectorXd e(static_cast<Eigen::Index>(reactant.size()));
  for (std::size_t k = 0; k < reactant.size(); ++k) e[k] = rates.energies[reactant[k]];
  const Eigen::VectorXd w = boltzmann_weights(e, beta);

  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(rates.size());
  for (std::size_t k = 0; k < reactant.size(); ++k) p0[reactant[k]] = w[k];
  return p0;
}

std::vector<double> uniform_time_grid(double step_ps, int n_steps) {
  std::vector<double> t(static_cast<std::size_t>(n_steps) + 1);
  for (int j = 0; j <= n_steps; ++j) t[j] = step_ps * j;
  return t;
}

SpectralPropagator::SpectralPropagator(const RateMatrix& rates, double beta,
                                       double symmetry_tolerance)
    : labels_(rates.labels) {
  const Eigen::Index n = rates.size();
  equilibrium_ = boltzmann_weights(rates.energies, beta);
  if ((equilibrium_.array() <= 0.0).any())
    throw NumericalError("Boltzmann weight underflow; energies span too wide for this temperature");
  sqrt_f_ = equilibrium_.array().sqrt().matrix();

  // B = M A M^-1 with M = diag(f^-1/2): B_ij = A_ij sqrt(f_j / f_i).
  Eigen::MatrixXd b = sqrt_f_.cwiseInverse().asDiagonal() * rates.generator * sqrt_f_.asDiagonal();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double scale = std::max(std::abs(b(i, j)), std::abs(b(j, i)));
      if (scale == 0.0) continue;
      symmetry_defect_ = std::max(symmetry_defect_, std::abs(b(i, j) - b(j, i)) / scale);
    }
  }
  if (symmetry_defect_ > symmetry_tolerance)
    throw DetailedBalanceError("symmetrized generator asymmetric: relative defect " +
                               std::to_string(symmetry_defect_));
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigensolver failed on symmetrized generator");
  eigenvalues_ = solver.eigenvalues();
  modes_ = solver.eigenvectors();
}

Eigen::VectorXd SpectralPropagator::evaluate(const Eigen::VectorXd& p0, double t) const {
  if (t == 0.0) return p0;
  const Eigen::VectorXd w = modes_.transpose() * p0.cwiseQuotient(sqrt_f_);
  const Eigen::VectorXd decayed = relaxation_factors(eigenvalues_, t).cwiseProduct(w);
  return sqrt_f_.cwiseProduct(modes_ * decayed);
}

Trajectory SpectralPropagator::propagate(const Eigen::VectorXd& p0,
                                         std::span<const double> times) const {
  const Eigen::Index n = sqrt_f_.size();
  if (p0.size() != n) throw DomainError("propagate: initial population has wrong size");
  if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-12)
    throw DomainError("propagate: initial population must be non-negative and sum to 1");

  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  const Eigen::Index m = static_cast<Eigen::Index>(times.size());
  traj.populations.resize(n, m);

  const Eigen::VectorXd w = modes_.transpose() * p0.cwiseQuotient(sqrt_f_);
  Eigen::MatrixXd decayed(n, m);
  for (Eigen::Index k = 0; k < m; ++k)
    decayed.col(k) = relaxation_factors(eigenvalues_, times[k]).cwiseProduct(w);
  traj.populations.noalias() = sqrt_f_.asDiagonal() * (modes_ * decayed);
  for (Eigen::Index k = 0; k < m; ++k)
    if (times[k] == 0.0) traj.populations.col(k) = p0;

  const double worst = traj.populations.minCoeff();
  if (worst < -1e-9)
    throw NumericalError("propagate: negative population " + std::to_string(worst));

  traj.reactant_population = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i)
    if (labels_[i].electronic == Electronic::reactant)
      traj.reactant_population += traj.populations.row(i).transpose();
  return traj;
}

Trajectory propagate(const RateMatrix& rates, const Eigen::VectorXd& p0,
                     std::span<const double> times, double beta) {
  return SpectralPropagator(rates, beta).propagate(p0, times);
}

namespace {

// d/dk of sum_j (y_j - exp(-k t_j))^2, up to a factor 2.
double fit_gradient(double k, std::span<const double> t, std::span<const double> y) {
  double g = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double e = std::exp(-k * t[j]);
    g += t[j] * e * (y[j] - e);
  }
  return g;
}

}  // namespace

RateFit fit_rate(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw DomainError("fit_rate: size mismatch");
  if (t.size() < 3) throw DomainError("fit_rate: need at least 3 time points");
  if (std::abs(y[0] - 1.0) > 1e-6) throw DomainError("fit_rate: p_R(0) must be 1");

  RateFit fit;
  const double g0 = fit_gradient(0.0, t, y);
  if (g0 != 0.0) {
    // The minimum lies on the side where the gradient is negative.
    const double dir = g0 < 0.0 ? 1.0 : -1.0;
    double lo = 0.0;
    double hi = dir / std::max(t.back(), 1e-300);
    for (int i = 0; i < 2000 && fit_gradient(hi, t, y) * dir < 0.0; ++i) {
      lo = hi;
      hi *= 2.0;
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (fit_gradient(mid, t, y) * dir < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    fit.rate = 0.5 * (lo + hi);
  }

  const std::size_t n = t.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = y[j] - std::exp(-fit.rate * t[j]);
    ss_res += r * r;
    ss_tot += (y[j] - mean) * (y[j] - mean);
  }
  if (ss_tot > 0.0) {
    const double dof = static_cast<double>(n - 1) / static_cast<double>(n - 2);
    fit.r2_adjusted = 1.0 - (ss_res / ss_tot) * dof;
  } else {
    fit.r2_adjusted = ss_res == 0.0 ? 1.0 : 0.0;
  }

  bool monotone = true;
  for (std::size_t j = 1; j < n; ++j)
    if (y[j] > y[j - 1] + 1e-9) monotone = false;
  if (!monotone)
    fit.warning = "reactant population is not monotone";
  else if (fit.r2_adjusted < 0.99)
    fit.warning = "poor exponential fit (adjusted R^2 = " + std::to_string(fit.r2_adjusted) + ")";
  return fit;
}

RateFit fit_rate(const Trajectory& trajectory) {
  return fit_rate(trajectory.times,
                  std::span<const double>(trajectory.reactant_population.data(),
                                          static_cast<std::size_t>(trajectory.reactant_population.size())));
}

}  // namespace vsc
