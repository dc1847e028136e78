#include <doctest.h>

#include <cmath>
#include <vector>

#include "vsc/disorder.hpp"
#include "vsc/spectrum.hpp"

using namespace vsc;

namespace {

std::vector<Eigensystem<double>> ensemble_of(int n, int count, double sigma = 10.0) {
  EnsembleParams e;
  e.n_molecules = n;
  e.disorder_sigma = sigma;
  std::vector<Eigensystem<double>> out;
  for (int r = 0; r < count; ++r)
    out.push_back(diagonalize(build_hamiltonian<double>(e, sample_disorder(e, 4, r))));
  return out;
}

}  // namespace

TEST_CASE("single molecule fills two bins equally") {
  const auto ens = ensemble_of(1, 3, 0.0);
  const auto rows = bin_eigenmode_stats(ens, 1.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bin_center == doctest::Approx(1920.0));
  CHECK(rows[1].bin_center == doctest::Approx(2080.0));
  for (const auto& r : rows) {
    CHECK(r.probability == doctest::Approx(0.5));
    CHECK(r.mean_photon_fraction == doctest::Approx(0.5));
    CHECK(r.n_modes == 3);
  }
}

TEST_CASE("bin edges are half-open on the left") {
  CHECK(SpectrumHistogram::bin_index(0.5, 1.0) == 0);
  CHECK(SpectrumHistogram::bin_index(0.5000001, 1.0) == 1);
  CHECK(SpectrumHistogram::bin_index(-0.5, 1.0) == -1);
  CHECK(SpectrumHistogram::bin_index(2000.0, 1.0) == 2000);
}

TEST_CASE("probabilities sum to one and dark selection drops polaritons") {
  const auto ens = ensemble_of(16, 10);
  const auto rows = bin_eigenmode_stats(ens, 1.0);
  double total = 0.0;
  std::size_t modes = 0;
  for (const auto& r : rows) {
    total += r.probability;
    modes += r.n_modes;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(modes == 170);
  std::size_t dark = 0;
  for (const auto& r : bin_eigenmode_stats(ens, 1.0, ModeSelection::dark)) dark += r.n_modes;
  CHECK(dark == 150);
}

TEST_CASE("merging partial histograms is order independent") {
  const auto ens = ensemble_of(16, 12);
  SpectrumHistogram forward(1.0), backward(1.0), split_a(1.0), split_b(1.0);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    forward.add(ens[i]);
    backward.add(ens[ens.size() - 1 - i]);
    (i % 2 ? split_a : split_b).add(ens[i]);
  }
  split_b.merge(split_a);
  const auto a = forward.rows(), b = backward.rows(), c = split_b.rows();
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].probability - b[i].probability) < 1e-9);
    CHECK(std::abs(a[i].mean_photon_fraction - c[i].mean_photon_fraction) < 1e-9);
    CHECK(std::abs(a[i].mean_molecular_pr - c[i].mean_molecular_pr) < 1e-9);
  }
}

TEST_CASE("merging histograms of different widths fails") {
  SpectrumHistogram a(1.0), b(2.0);
  CHECK_THROWS(a.merge(b));
}

TEST_CASE("empty ensemble is rejected") {
  std::vector<Eigensystem<double>> none;
  CHECK_THROWS_AS(bin_eigenmode_stats(none, 1.0), DomainError);
}

TEST_CASE("gaussian bin masses sum to one") {
  double total = 0.0;
  for (int l = 1900; l <= 2100; ++l) total += gaussian_bin_probability(l, 1.0, 2000.0, 10.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gaussian_bin_probability(2000.0, 1.0, 2000.0, 10.0) ==
        doctest::Approx(std::erf(0.05 / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("total variation of the reference against itself is zero") {
  std::vector<SpectrumRow> rows;
  for (int l = 1900; l <= 2100; ++l) {
    SpectrumRow r;
    r.bin_center = l;
    r.probability = gaussian_bin_probability(l, 1.0, 2000.0, 10.0);
    rows.push_back(r);
  }
  CHECK(total_variation_from_gaussian(rows, 1.0, 2000.0, 10.0) < 1e-12);
  CHECK(total_variation_from_gaussian(rows, 1.0, 2100.0, 10.0) > 0.9);
}
