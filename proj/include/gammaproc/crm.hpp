#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "gammaproc/numeric/rng.hpp"

namespace gammaproc {

/// Gamma process prior: stick concentration alpha, rate concentration c, and
/// mass (the Poisson rate of atoms per round).
struct GammaProcessParams {
  double alpha = 1.0;
  double c = 1.0;
  double mass = 1.0;

  /// Throws DomainError unless all three are positive and finite.
  void validate() const;
};

struct WeightedAtom {
  int round = 1;           // 1-based
  int index_in_round = 1;  // 1-based within its round
  double weight = 0.0;
  std::uint64_t atom_id = 0;

  friend bool operator==(const WeightedAtom&, const WeightedAtom&) = default;
};

struct GammaProcessDraw {
  GammaProcessParams params;
  int rounds = 0;
  std::vector<WeightedAtom> atoms;  // ordered by (round, index_in_round)

  std::size_t atoms_in_round(int round) const;
};

/// The three equal-in-law ways of producing a round-i atom weight.
enum class StickVariant {
  /// Gamma(alpha+1, c) * Beta(1, alpha) * prod_{l=1..i} (1 - Beta(1, alpha)),
  /// every Beta factor independent; the product is accumulated in log space.
  round_product,
  /// Exp(c) * exp(-Gamma(i, alpha)).
  theorem,
  /// Exp(c) * prod_{l=1..i} Beta(alpha, 1).
  ibp_product,
};

StickVariant parse_stick_variant(std::string_view name);
std::string_view stick_variant_name(StickVariant variant);

/// Truncated draw over rounds 1..rounds. Round i uses the sub-stream labeled i
/// of `rng`, so rounds can be generated in any order; atom ids are assigned
/// sequentially in (round, index) order.
GammaProcessDraw draw_stick(const GammaProcessParams& params, int rounds, StickVariant variant,
                            const SeededRng& rng);

/// One round-`round` atom weight drawn with the chosen variant.
double draw_atom_weight(const GammaProcessParams& params, int round, StickVariant variant,
                        SeededRng& rng);

double total_mass(const GammaProcessDraw& draw);

/// alpha^i / (c (1 + alpha)^i)
double expected_round_weight(const GammaProcessParams& params, int round);

/// mass * alpha / c
double expected_total_mass(const GammaProcessParams& params);

/// Line-oriented "round index weight atom_id" text; weights are written in
/// shortest round-trip decimal form. Lines starting with '#' are comments.
void write_draw(std::ostream& out, const GammaProcessDraw& draw);
GammaProcessDraw read_draw(std::istream& in, const GammaProcessParams& params);

}  // namespace gammaproc
