#include "vsc/analysis.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "vsc/rates.hpp"
#include "vsc/units.hpp"

namespace vsc {

double analytical_bare_rate(double k_f, double k_b, double gamma) {
  if (k_f < 0.0 || k_b < 0.0 || gamma < 0.0)
    throw DomainError("analytical_bare_rate: rates must be non-negative");
  if (!(gamma + k_b > 0.0)) throw DomainError("analytical_bare_rate: gamma + k_b must be positive");
  return k_f * gamma / (gamma + k_b);
}

double analytical_vsc_rate(const Eigensystem<double>& eig, double k_f, double k_b, double gamma) {
  if (!(gamma + k_b > 0.0)) throw DomainError("analytical_vsc_rate: gamma + k_b must be positive");
  double sum = 0.0;
  for (Eigen::Index q = 0; q < eig.size(); ++q) {
    if (!eig.is_dark(q)) continue;
    const double c = eig.coefficients(q, kReactiveColumn);
    const double w = c * c;
    sum += w * gamma / (gamma + w * k_b);
  }
  return k_f * sum;
}

BareChannelRates bare_channel_rates(const ReactionParams& reaction, double reactive_freq) {
  // A lone reactive vibration: one mode, fully on the reactive column.
  Eigensystem<double> eig;
  eig.frequencies = Eigen::VectorXd::Constant(1, reactive_freq);
  eig.coefficients = Eigen::MatrixXd::Zero(1, 2);
  eig.coefficients(0, kReactiveColumn) = 1.0;
  const VibronicDressing dressing = make_dressing(eig, reactive_freq, reaction);
  const StateLabel r0 = StateLabel::ground(Electronic::reactant);
  const StateLabel p1 = StateLabel::excited(Electronic::product, 0);
  return {reactive_rate(r0, p1, dressing, eig, reaction),
          reactive_rate(p1, r0, dressing, eig, reaction)};
}

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ = (na * mean_ + nb * o.mean_) / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
}

std::optional<double> RunningStats::standard_error() const {
  if (n_ < 2) return std::nullopt;
  const double n = static_cast<double>(n_);
  return std::sqrt(m2_ / n) / std::sqrt(n);
}

void PairedStats::add(double x, double y) {
  const double dx = x - x_.mean();
  x_.add(x);
  y_.add(y);
  comoment_ += dx * (y - y_.mean());
}

void PairedStats::merge(const PairedStats& o) {
  if (o.count() == 0) return;
  if (count() == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count()), nb = static_cast<double>(o.count());
  const double dx = o.x_.mean() - x_.mean();
  const double dy = o.y_.mean() - y_.mean();
  comoment_ += o.comoment_ + dx * dy * na * nb / (na + nb);
  x_.merge(o.x_);
  y_.merge(o.y_);
}

Estimate PairedStats::ratio() const {
  Estimate e;
  if (count() == 0) {
    e.mean = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  const double mx = x_.mean(), my = y_.mean();
  e.mean = mx / my;
  if (count() >= 2) {
    const double n = static_cast<double>(count());
    const double vx = x_.m2() / n, vy = y_.m2() / n, cxy = comoment_ / n;
    const double rel = vx / (mx * mx) + vy / (my * my) - 2.0 * cxy / (mx * my);
    e.standard_error = std::abs(e.mean) * std::sqrt(std::max(rel, 0.0) / n);
  }
  return e;
}

void EnsembleAccumulator::add(const RealizationRecord& r) {
  ++n_;
  auto put = [](RunningStats& s, double v) {
    if (!std::isnan(v)) s.add(v);
  };
  put(k_vsc_, r.k_vsc);
  put(k_bare_, r.k_bare);
  put(deloc_, r.delocalization);
  put(dark_pr_, r.dark_pr);
  put(k_vsc_an_, r.k_vsc_analytical);
  put(k_bare_an_, r.k_bare_analytical);
  if (!std::isnan(r.k_vsc) && !std::isnan(r.k_bare)) ratio_.add(r.k_vsc, r.k_bare);
  if (!std::isnan(r.k_vsc_analytical) && !std::isnan(r.k_bare_analytical))
    ratio_an_.add(r.k_vsc_analytical, r.k_bare_analytical);
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& o) {
  n_ += o.n_;
  k_vsc_.merge(o.k_vsc_);
  k_bare_.merge(o.k_bare_);
  deloc_.merge(o.deloc_);
  dark_pr_.merge(o.dark_pr_);
  k_vsc_an_.merge(o.k_vsc_an_);
  k_bare_an_.merge(o.k_bare_an_);
  ratio_.merge(o.ratio_);
  ratio_an_.merge(o.ratio_an_);
}

EnsembleResult EnsembleAccumulator::result(const SweepPoint& point) const {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto est = [&](const RunningStats& s) {
    return s.count() ? s.estimate() : Estimate{nan, std::nullopt};
  };
  EnsembleResult r;
  r.point = point;
  r.n_realizations = n_;
  r.k_vsc = est(k_vsc_);
  r.k_bare = est(k_bare_);
  r.ratio = ratio_.ratio();
  r.delocalization = est(deloc_);
  r.dark_pr = est(dark_pr_);
  r.k_vsc_analytical = est(k_vsc_an_);
  r.k_bare_analytical = est(k_bare_an_);
  r.ratio_analytical = ratio_an_.ratio();
  return r;
}

EnsembleResult ensemble_average(std::span<const RealizationRecord> records, const SweepPoint& point) {
  if (records.empty()) throw DomainError("ensemble_average: no realizations");
  EnsembleAccumulator acc;
  for (const auto& r : records) acc.add(r);
  return acc.result(point);
}

double eyring_rate(double temperature, double enthalpy_kj_mol, double entropy_j_mol_k) {
  const double r = units::kGasConstant;
  const double k_si = units::kBoltzmannSI * temperature / units::kPlanckSI *
                      std::exp(-enthalpy_kj_mol * 1e3 / (r * temperature) + entropy_j_mol_k / r);
  return k_si / units::kPerPsToPerS;
}

EyringFit eyring_fit(std::span<const double> temperatures, std::span<const double> rates) {
  if (temperatures.size() != rates.size()) throw DomainError("eyring_fit: size mismatch");
  if (std::set<double>(temperatures.begin(), temperatures.end()).size() < 3)
    throw DomainError("eyring_fit: need at least 3 distinct temperatures");
  const std::size_t n = temperatures.size();
  Eigen::VectorXd x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = temperatures[i];
    if (!(t > 0.0)) throw DomainError("eyring_fit: temperatures must be positive");
    if (!(rates[i] > 0.0)) throw DomainError("eyring_fit: rates must be positive");
    const double k_si = rates[i] * units::kPerPsToPerS;
    x[i] = 1.0 / t;
    y[i] = std::log(k_si * units::kPlanckSI / (units::kBoltzmannSI * t));
  }
  const double mx = x.mean(), my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const double slope = (dx * (y.array() - my)).sum() / dx.square().sum();
  const double intercept = my - slope * mx;

  EyringFit fit;
  fit.enthalpy = -slope * units::kGasConstant / 1e3;
  fit.entropy = intercept * units::kGasConstant;

  double mean_k = 0.0;
  for (double k : rates) mean_k += k;
  mean_k /= static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = eyring_rate(temperatures[i], fit.enthalpy, fit.entropy);
    ss_res += (rates[i] - pred) * (rates[i] - pred);
    ss_tot += (rates[i] - mean_k) * (rates[i] - mean_k);
  }
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  // With n = 3 there are no residual degrees of freedom; report the plain R^2.
  fit.r2_adjusted = n > 3 ? 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - 3)
                          : r2;
  return fit;
}

}  // namespace vsc
