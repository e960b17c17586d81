#pragma once

#include <cstdint>
#include <random>

namespace etpsim {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the stream for one (repetition, grid point). Changing this breaks
/// every golden dataset, so treat it as frozen.
constexpr std::uint64_t point_seed(std::uint64_t master, std::uint64_t repetition,
                                   std::uint64_t grid_index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ ((repetition + 1) * 0xD1B54A32D192ED03ULL));
  h = splitmix64(h ^ ((grid_index + 1) * 0x8CB92BA72F3D8DD7ULL));
  return h;
}

/// mt19937_64 with a platform-independent uniform draw in (0, 1).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Poisson variate: sequential inversion below mean 30, PTRS
/// transformed rejection above.
std::uint64_t sample_poisson(double mean, RandomStream& rng);

/// Largest mean accepted by sample_poisson.
inline constexpr double kMaxPoissonMean = 1e15;

}  // namespace etpsim
