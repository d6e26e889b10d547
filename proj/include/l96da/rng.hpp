#pragma once

#include <cstdint>
#include <random>

namespace l96da {

/// Purpose tags for deriving independent substreams from one master seed.
/// Truth and observations depend only on the master seed, never on the
/// assimilation method, so every method sees the same twin experiment.
enum class Stream : std::uint64_t {
  ReferenceInit = 1,
  ObsNoise = 2,
  PerturbedObs = 3,
  EnsembleInit = 4,
  ObsOrder = 5,
  Bench = 6,
};

/// Counter-based substream derivation: equal (master, stream, index) tuples
/// give equal seeds, distinct tuples give statistically independent ones.
std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::uint64_t index = 0);

/// Deterministic generator. Normal draws go through the inverse cdf so the
/// stream is reproducible bit-for-bit across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform draw in the open interval (0,1).
  double uniform01();

  /// Standard normal draw.
  double normal();

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
};

}  // namespace l96da
