#pragma once

#include <cstdint>
#include <random>

namespace loewner {

// SplitMix64 finalizer. Fixed so replica streams are portable across machines.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replica `index` in a run seeded with `seed`:
//   mix(seed, i) = splitmix64(splitmix64(seed) ^ (i * golden)).
// Distinct (seed, i) pairs give independent-looking streams; the value does not
// depend on how replicas are scheduled.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

// Gaussian stream with a fully specified transform (the standard library's
// normal_distribution is implementation-defined).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1) from the top 53 bits.
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Marsaglia polar method; values are produced in pairs.
  double normal() noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace loewner
