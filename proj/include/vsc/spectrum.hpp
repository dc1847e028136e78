#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "vsc/hamiltonian.hpp"

namespace vsc {

enum class ModeSelection { all, dark };

struct SpectrumRow {
  double bin_center = 0.0;          // cm^-1
  double probability = 0.0;         // fraction of all counted modes in this bin
  double mean_photon_fraction = 0.0;
  double mean_molecular_pr = 0.0;   // NaN when no mode in the bin carries molecular weight
  std::size_t n_modes = 0;
};

/// Eigenmode histogram over bins (w*(l-1/2), w*(l+1/2)] of absolute frequency.
/// Partial histograms merge commutatively, so realizations can be binned independently.
class SpectrumHistogram {
 public:
  explicit SpectrumHistogram(double bin_width);

  void add(const Eigensystem<double>& eig, ModeSelection selection = ModeSelection::all);
  void merge(const SpectrumHistogram& other);

  std::vector<SpectrumRow> rows() const;
  std::size_t total_modes() const { return total_; }
  double bin_width() const { return width_; }
  bool empty() const { return total_ == 0; }

  static long bin_index(double frequency, double bin_width);

 private:
  struct Bin {
    std::size_t count = 0;
    double photon_sum = 0.0;
    double pr_sum = 0.0;
    std::size_t pr_count = 0;
  };
  double width_;
  std::size_t total_ = 0;
  std::map<long, Bin> bins_;
};

/// Bins every eigenmode of every realization; probabilities sum to 1.
std::vector<SpectrumRow> bin_eigenmode_stats(std::span<const Eigensystem<double>> ensemble,
                                             double bin_width,
                                             ModeSelection selection = ModeSelection::all);

/// Probability mass a Normal(mean, sigma) distribution places in the bin centered at `center`.
double gaussian_bin_probability(double center, double bin_width, double mean, double sigma);

/// Total-variation distance between histogram rows and the Gaussian bin masses.
double total_variation_from_gaussian(std::span<const SpectrumRow> rows, double bin_width,
                                     double mean, double sigma);

}  // namespace vsc
