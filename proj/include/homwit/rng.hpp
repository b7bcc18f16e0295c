#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace homwit::rng {

/// SplitMix64 finalizer. Stateless mixing of a 64-bit word.
std::uint64_t mix(std::uint64_t x);

/// Seed derivation for independent sub-streams.
///
/// Every consumer of randomness derives its own seed as
///   derive(base_seed, purpose_tag, index)
/// so that runs are bit-reproducible and sub-streams never alias each other.
/// The scheme is mix(mix(base ^ tag) + index).
std::uint64_t derive(std::uint64_t base, std::uint64_t tag, std::uint64_t index);

// Purpose tags for the sub-streams used across the pipeline.
inline constexpr std::uint64_t kTagEvents = 0x4856454e54533031ull;
inline constexpr std::uint64_t kTagAnrd = 0x48414e5244303031ull;
inline constexpr std::uint64_t kTagBootstrap = 0x48424f4f54533031ull;
inline constexpr std::uint64_t kTagResample = 0x485245533031ull;
inline constexpr std::uint64_t kTagEfficiency = 0x48454646303031ull;

/// Deterministic random stream. All distributions are implemented on top of
/// raw mt19937_64 output so results depend only on the seed, not on the
/// standard library's distribution internals.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via the Marsaglia polar method.
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

  /// Exact Poisson sample by inversion anchored at the distribution mode.
  /// Expected cost O(sqrt(mean)).
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Multinomial sample: n events over the given probability vector
/// (renormalized internally). Cost O(n log k).
std::vector<std::uint64_t> multinomial(Stream& stream, std::uint64_t n,
                                       std::span<const double> probs);

}  // namespace homwit::rng
