#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace gammaproc {

/// Seeded 64-bit generator with reproducible labeled sub-streams.
///
/// A sub-stream's seed is a hash of the parent seed and the label only, so
/// the order in which sub-streams are created or consumed never changes the
/// numbers they produce. Satisfies UniformRandomBitGenerator.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  explicit SeededRng(std::uint64_t seed = 0);

  SeededRng substream(std::uint64_t label) const;
  SeededRng substream(std::initializer_list<std::uint64_t> labels) const;
  SeededRng substream(std::string_view label) const;

  std::uint64_t seed() const noexcept { return seed_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label) noexcept;

}  // namespace gammaproc
