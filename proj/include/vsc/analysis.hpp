#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "vsc/hamiltonian.hpp"
#include "vsc/params.hpp"

namespace vsc {

/// Steady-state rate of R0 -> P1 -> P0 with reversion: k_f gamma / (gamma + k_b).
double analytical_bare_rate(double k_f, double k_b, double gamma);

/// Dark-mode average of the bare expression, weighted by |c_qr|^2:
/// k_f sum_{q dark} |c_qr|^2 gamma / (gamma + |c_qr|^2 k_b).
double analytical_vsc_rate(const Eigensystem<double>& eig, double k_f, double k_b, double gamma);

struct BareChannelRates {
  double k_f = 0.0;  // (R,0) -> (P,1_r), ps^-1
  double k_b = 0.0;  // (P,1_r) -> (R,0), ps^-1
};

/// k_f and k_b of the uncoupled reactive molecule with vibrational frequency `reactive_freq`.
BareChannelRates bare_channel_rates(const ReactionParams& reaction, double reactive_freq);

/// Mean and standard error; the error is empty for fewer than two samples.
struct Estimate {
  double mean = 0.0;
  std::optional<double> standard_error;
};

/// Count / mean / second moment with Chan's pairwise merge.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  /// Population standard deviation over sqrt(n).
  std::optional<double> standard_error() const;
  Estimate estimate() const { return {mean_, standard_error()}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Paired samples (x, y) for the ratio of means mean(x)/mean(y).
class PairedStats {
 public:
  void add(double x, double y);
  void merge(const PairedStats& other);

  const RunningStats& x() const { return x_; }
  const RunningStats& y() const { return y_; }
  std::size_t count() const { return x_.count(); }
  /// Ratio of means with a delta-method standard error.
  Estimate ratio() const;

 private:
  RunningStats x_, y_;
  double comoment_ = 0.0;
};

struct SweepPoint {
  int n_molecules = 0;
  double detuning = 0.0;
  double collective_coupling = 0.0;
  double kappa = 0.0;
  double temperature = 0.0;
};

/// Per-realization outcome of one sweep point. Missing quantities are NaN.
struct RealizationRecord {
  std::size_t index = 0;
  double k_vsc = 0.0;
  double k_bare = 0.0;
  double delocalization = 0.0;
  double dark_pr = 0.0;
  double k_vsc_analytical = 0.0;
  double k_bare_analytical = 0.0;
};

struct EnsembleResult {
  SweepPoint point;
  std::size_t n_realizations = 0;
  Estimate k_vsc, k_bare, ratio;
  Estimate delocalization, dark_pr;
  Estimate k_vsc_analytical, k_bare_analytical, ratio_analytical;
};

/// Commutative monoid over realization records.
class EnsembleAccumulator {
 public:
  void add(const RealizationRecord& r);
  void merge(const EnsembleAccumulator& other);
  EnsembleResult result(const SweepPoint& point) const;
  std::size_t count() const { return n_; }

 private:
  std::size_t n_ = 0;
  RunningStats k_vsc_, k_bare_, deloc_, dark_pr_, k_vsc_an_, k_bare_an_;
  PairedStats ratio_, ratio_an_;
};

/// Ratios are ratios of mean rates, not means of per-realization ratios.
EnsembleResult ensemble_average(std::span<const RealizationRecord> records, const SweepPoint& point);

struct EyringFit {
  double enthalpy = 0.0;  // kJ/mol
  double entropy = 0.0;   // J/(mol K)
  double r2_adjusted = 0.0;
};

/// Linearized Eyring-Polanyi fit of k(T), k in ps^-1. Adjusted R^2 is computed on
/// k itself with two parameters.
EyringFit eyring_fit(std::span<const double> temperatures, std::span<const double> rates);

/// k(T) = (k_B T / h) exp(-dH/RT + dS/R), in ps^-1.
double eyring_rate(double temperature, double enthalpy_kj_mol, double entropy_j_mol_k);

}  // namespace vsc
