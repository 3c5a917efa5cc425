#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace diqsdc {

// SplitMix64 finalizer; used for seed derivation only.
std::uint64_t mix64(std::uint64_t x);

// Seeded deterministic stream with hand-written draw routines.
// Substreams derive from the construction seed, not the engine position.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  RandomSource substream(std::string_view name) const;
  RandomSource substream(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  // `count` distinct indices from [0, population), ascending.
  std::vector<std::size_t> choose_sorted(std::size_t population, std::size_t count);

  bool operator==(const RandomSource& other) const = default;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Per-trial seed used by batch runs: a pure function of (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace diqsdc
