#pragma once

#include <cstdint>
#include <random>

namespace mano {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` of a run seeded with `seed`:
/// splitmix64(seed ^ splitmix64(stream + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Portable random stream. Bits come from std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the conversions below are pinned
/// here rather than delegated to std:: distributions, which are
/// implementation-defined.
///
///   uniform()  = (next() >> 11) * 2^-53                      in [0, 1)
///   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)          one value per two draws
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace mano
