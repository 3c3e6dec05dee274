#pragma once

#include <cstdint>
#include <limits>

namespace dtnlab {

// Counter-based splitmix64 generator. Every (root seed, stream, slot, entity)
// tuple opens an independent sequence, so toggling one subsystem never
// perturbs the draws of another and matched-seed runs stay comparable
// decision by decision.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}
}  // namespace detail

/// Named substreams of a single root seed.
enum class Stream : std::uint64_t {
  Arrivals = 1,
  Mobility = 2,
  Scheduling = 3,
  Experiment = 4,
};

/// Generator for one (stream, slot, entity) cell of the random field.
inline SplitMix64 substream(std::uint64_t root, Stream stream,
                            std::uint64_t slot, std::uint64_t entity) {
  std::uint64_t h = detail::hash_mix(root, static_cast<std::uint64_t>(stream));
  h = detail::hash_mix(h, slot);
  h = detail::hash_mix(h, entity);
  return SplitMix64(h);
}

}  // namespace dtnlab
