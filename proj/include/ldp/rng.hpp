#pragma once

#include <cstdint>

namespace ldp {

// Counter-based pseudo-random streams.
//
// Every draw is a pure function of (key, counter), so a run is reproducible
// and replicates can be evaluated in parallel without sharing generator
// state. Child streams derived with different indices are statistically
// independent for Monte Carlo purposes (SplitMix64-style avalanche mixing;
// not cryptographic).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  static RandomStream root(std::uint64_t seed) {
    return RandomStream(mix(0x6c62272e07bb0142ULL, seed));
  }

  // Independent child stream, e.g. one per replicate or observation.
  RandomStream derive(std::uint64_t index) const {
    return RandomStream(mix(key_, 0x9e3779b97f4a7c15ULL + index));
  }

  std::uint64_t key() const { return key_; }

  // Stateless draws addressed by counter.
  std::uint64_t bits_at(std::uint64_t counter) const {
    return mix(key_, counter);
  }
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(bits_at(counter) >> 11) * 0x1.0p-53;
  }

  // Sequential convenience interface over the same counter space.
  std::uint64_t next_bits() { return bits_at(counter_++); }
  double next_uniform() { return uniform_at(counter_++); }
  bool next_bernoulli(double p) { return next_uniform() < p; }

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix(splitmix(a) ^ (b + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ldp
