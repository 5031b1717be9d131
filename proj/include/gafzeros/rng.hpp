#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace gafz {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream for one trial. Depends only on (master, trial) so any
/// trial can be regenerated in isolation, independent of worker layout.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master,
                                           std::uint64_t trial) noexcept {
  return mix64(mix64(master) ^ mix64(trial ^ 0x5851f42d4c957f2dULL));
}

struct SeedRecord {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

/// Per-trial random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; Gaussian variates use an explicit
/// Box-Muller transform rather than std::normal_distribution so that draws
/// are identical across standard library implementations.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t trial_index)
      : seed_{master_seed, trial_index},
        engine_(derive_stream_seed(master_seed, trial_index)) {}

  const SeedRecord& seed() const noexcept { return seed_; }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool coin() noexcept { return (engine_() >> 63) != 0; }

  /// Standard complex Gaussian: independent real and imaginary parts, each
  /// N(0, 1/2), so E|b|^2 = 1 and E b^2 = 0.
  std::complex<double> complex_gaussian() noexcept;

  /// Real N(0, 1).
  double gaussian() noexcept;

  std::uint64_t next_u64() noexcept { return engine_(); }

 private:
  SeedRecord seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gafz
