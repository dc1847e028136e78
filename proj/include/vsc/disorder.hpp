#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Core>

#include "vsc/params.hpp"

namespace vsc {

/// Static diagonal disorder: one Gaussian frequency offset per molecule.
struct DisorderRealization {
  Eigen::VectorXd offsets;  // cm^-1, length N
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

/// SplitMix64 finalizer chained over `parts`; used to key independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);

/// Draws N offsets ~ Normal(0, sigma) from a stream keyed on (seed, index).
/// Identical (seed, index, N, sigma) reproduce identical offsets bit-for-bit.
DisorderRealization sample_disorder(const EnsembleParams& params, std::uint64_t seed,
                                    std::uint64_t index);

/// Standard normal generator over mt19937_64 using the Marsaglia polar method.
/// Uniforms take the top 53 bits of each draw, so the stream is fully specified
/// by the engine and does not depend on the standard library's distributions.
class StandardNormal {
 public:
  explicit StandardNormal(std::uint64_t seed) : engine_(seed) {}
  double operator()();

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vsc
