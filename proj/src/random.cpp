#include "diqsdc/random.hpp"

#include <stdexcept>

namespace diqsdc {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

RandomSource RandomSource::substream(std::string_view name) const {
  return RandomSource(mix64(seed_ ^ mix64(fnv1a(name))));
}

RandomSource RandomSource::substream(std::uint64_t index) const {
  return RandomSource(derive_seed(seed_, index));
}

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomSource::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("RandomSource::below: bound must be positive");
  // Rejects the incomplete top range.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % bound;
}

std::vector<std::size_t> RandomSource::choose_sorted(std::size_t population, std::size_t count) {
  if (count > population) throw std::invalid_argument("choose_sorted: count exceeds population");
  // Selection sampling (Knuth, Algorithm S): one pass, already ordered.
  std::vector<std::size_t> out;
  out.reserve(count);
  std::size_t needed = count;
  for (std::size_t i = 0; i < population && needed > 0; ++i) {
    if (below(population - i) < needed) {
      out.push_back(i);
      --needed;
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x5851f42d4c957f2dULL));
}

}  // namespace diqsdc
