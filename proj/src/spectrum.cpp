#include "vsc/spectrum.hpp"

#include <cmath>
#include <limits>

namespace vsc {

SpectrumHistogram::SpectrumHistogram(double bin_width) : width_(bin_width) {
  if (!(bin_width > 0.0)) throw DomainError("SpectrumHistogram: bin width must be positive");
}

long SpectrumHistogram::bin_index(double frequency, double bin_width) {
  // Upper-closed bins: frequency in (w(l-1/2), w(l+1/2)] maps to l.
  return static_cast<long>(std::ceil(frequency / bin_width - 0.5));
}

void SpectrumHistogram::add(const Eigensystem<double>& eig, ModeSelection selection) {
  for (Eigen::Index q = 0; q < eig.size(); ++q) {
    if (selection == ModeSelection::dark && !eig.is_dark(q)) continue;
    Bin& bin = bins_[bin_index(eig.frequencies[q], width_)];
    ++bin.count;
    ++total_;
    bin.photon_sum += photon_fraction(eig, q);
    if (molecular_weight(eig, q) > 1e-14) {
      bin.pr_sum += molecular_pr(eig, q);
      ++bin.pr_count;
    }
  }
}

void SpectrumHistogram::merge(const SpectrumHistogram& other) {
  if (other.width_ != width_) throw DomainError("SpectrumHistogram: bin widths differ");
  for (const auto& [l, b] : other.bins_) {
    Bin& mine = bins_[l];
    mine.count += b.count;
    mine.photon_sum += b.photon_sum;
    mine.pr_sum += b.pr_sum;
    mine.pr_count += b.pr_count;
  }
  total_ += other.total_;
}

std::vector<SpectrumRow> SpectrumHistogram::rows() const {
  std::vector<SpectrumRow> out;
  out.reserve(bins_.size());
  for (const auto& [l, b] : bins_) {
    SpectrumRow row;
    row.bin_center = static_cast<double>(l) * width_;
    row.n_modes = b.count;
    row.probability = static_cast<double>(b.count) / static_cast<double>(total_);
    row.mean_photon_fraction = b.photon_sum / static_cast<double>(b.count);
    row.mean_molecular_pr = b.pr_count ? b.pr_sum / static_cast<double>(b.pr_count)
                                       : std::numeric_limits<double>::quiet_NaN();
    out.push_back(row);
  }
  return out;
}

std::vector<SpectrumRow> bin_eigenmode_stats(std::span<const Eigensystem<double>> ensemble,
                                             double bin_width, ModeSelection selection) {
  if (ensemble.empty()) throw DomainError("bin_eigenmode_stats: empty ensemble");
  SpectrumHistogram hist(bin_width);
  for (const auto& eig : ensemble) hist.add(eig, selection);
  return hist.rows();
}

double gaussian_bin_probability(double center, double bin_width, double mean, double sigma) {
  const double lo = (center - 0.5 * bin_width - mean) / (sigma * std::sqrt(2.0));
  const double hi = (center + 0.5 * bin_width - mean) / (sigma * std::sqrt(2.0));
  // erfc differences keep precision in the upper tail.
  if (lo > 0.0) return 0.5 * (std::erfc(lo) - std::erfc(hi));
  return 0.5 * (std::erfc(-hi) - std::erfc(-lo));
}

double total_variation_from_gaussian(std::span<const SpectrumRow> rows, double bin_width,
                                     double mean, double sigma) {
  double covered = 0.0;
  double distance = 0.0;
  for (const auto& row : rows) {
    const double ref = gaussian_bin_probability(row.bin_center, bin_width, mean, sigma);
    covered += ref;
    distance += std::abs(row.probability - ref);
  }
  // Reference mass in bins the histogram never visited.
  distance += std::max(0.0, 1.0 - covered);
  return 0.5 * distance;
}

}  // namespace vsc
