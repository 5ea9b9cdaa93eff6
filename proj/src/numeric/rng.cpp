#include "gammaproc/numeric/rng.hpp"

namespace gammaproc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(label ^ 0xD1B54A32D192ED03ULL));
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

SeededRng SeededRng::substream(std::uint64_t label) const {
  return SeededRng(mix_seed(seed_, label));
}

SeededRng SeededRng::substream(std::initializer_list<std::uint64_t> labels) const {
  std::uint64_t s = seed_;
  for (auto label : labels) s = mix_seed(s, label);
  return SeededRng(s);
}

SeededRng SeededRng::substream(std::string_view label) const {
  return SeededRng(mix_seed(seed_, fnv1a(label)));
}

double SeededRng::uniform() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace gammaproc
