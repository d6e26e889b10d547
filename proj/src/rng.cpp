#include "l96da/rng.hpp"

#include <stdexcept>

#include "l96da/normal.hpp"

namespace l96da {

namespace {
// SplitMix64 finalizer; full-period mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::uint64_t index) {
  std::uint64_t z = mix64(master);
  z = mix64(z ^ static_cast<std::uint64_t>(stream));
  z = mix64(z ^ index);
  return z;
}

double Rng::uniform01() {
  // 53 random bits, shifted into the open interval.
  const std::uint64_t bits = gen_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_quantile(uniform01()); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  return gen_() % n;
}

}  // namespace l96da
