#include "vsc/disorder.hpp"

#include <cmath>

namespace vsc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

double StandardNormal::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

DisorderRealization sample_disorder(const EnsembleParams& params, std::uint64_t seed,
                                    std::uint64_t index) {
  DisorderRealization r;
  r.seed = seed;
  r.index = index;
  r.offsets = Eigen::VectorXd::Zero(params.n_molecules);
  if (params.disorder_sigma == 0.0) return r;
  StandardNormal normal(derive_seed(seed, {index}));
  for (Eigen::Index i = 0; i < r.offsets.size(); ++i)
    r.offsets[i] = params.disorder_sigma * normal();
  return r;
}

}  // namespace vsc
