#include "gammaproc/crm.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gammaproc/error.hpp"
#include "gammaproc/numeric/distributions.hpp"

namespace gammaproc {

void GammaProcessParams::validate() const {
  auto ok = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!ok(alpha) || !ok(c) || !ok(mass)) {
    throw DomainError("gamma process parameters alpha, c, mass must be positive");
  }
}

std::size_t GammaProcessDraw::atoms_in_round(int round) const {
  std::size_t n = 0;
  for (const auto& a : atoms) n += a.round == round ? 1 : 0;
  return n;
}

StickVariant parse_stick_variant(std::string_view name) {
  if (name == "round-product") return StickVariant::round_product;
  if (name == "theorem") return StickVariant::theorem;
  if (name == "ibp-product") return StickVariant::ibp_product;
  throw DomainError("unknown stick-breaking variant: " + std::string(name));
}

std::string_view stick_variant_name(StickVariant variant) {
  switch (variant) {
    case StickVariant::round_product: return "round-product";
    case StickVariant::theorem: return "theorem";
    case StickVariant::ibp_product: return "ibp-product";
  }
  return "?";
}

double draw_atom_weight(const GammaProcessParams& params, int round, StickVariant variant,
                        SeededRng& rng) {
  switch (variant) {
    case StickVariant::round_product: {
      double log_w = std::log(sample_gamma(params.alpha + 1.0, params.c, rng)) +
                     std::log(sample_beta(1.0, params.alpha, rng));
      for (int l = 1; l <= round; ++l) log_w += std::log1p(-sample_beta(1.0, params.alpha, rng));
      return std::exp(log_w);
    }
    case StickVariant::theorem:
      return sample_exponential(params.c, rng) *
             std::exp(-sample_gamma(static_cast<double>(round), params.alpha, rng));
    case StickVariant::ibp_product: {
      double log_w = std::log(sample_exponential(params.c, rng));
      for (int l = 1; l <= round; ++l) log_w += std::log(sample_beta(params.alpha, 1.0, rng));
      return std::exp(log_w);
    }
  }
  return 0.0;
}

GammaProcessDraw draw_stick(const GammaProcessParams& params, int rounds, StickVariant variant,
                            const SeededRng& rng) {
  if (rounds < 1) throw DomainError("draw_stick: rounds must be at least 1");
  params.validate();
  GammaProcessDraw draw{params, rounds, {}};
  std::uint64_t next_id = 0;
  for (int i = 1; i <= rounds; ++i) {
    SeededRng round_rng = rng.substream(static_cast<std::uint64_t>(i));
    const auto count = sample_poisson(params.mass, round_rng);
    for (std::uint64_t j = 1; j <= count; ++j) {
      const double w = draw_atom_weight(params, i, variant, round_rng);
      // An exact-zero weight is an underflow at extreme depth; keep the
      // positivity invariant with the smallest representable weight.
      draw.atoms.push_back({i, static_cast<int>(j), w > 0.0 ? w : std::numeric_limits<double>::denorm_min(),
                            next_id++});
    }
  }
  return draw;
}

double total_mass(const GammaProcessDraw& draw) {
  double s = 0.0;
  for (const auto& a : draw.atoms) s += a.weight;
  return s;
}

double expected_round_weight(const GammaProcessParams& params, int round) {
  if (round < 1) throw DomainError("expected_round_weight: round must be at least 1");
  params.validate();
  return std::exp(round * std::log(params.alpha / (1.0 + params.alpha))) / params.c;
}

double expected_total_mass(const GammaProcessParams& params) {
  params.validate();
  return params.mass * params.alpha / params.c;
}

void write_draw(std::ostream& out, const GammaProcessDraw& draw) {
  out << "# gamma process draw: alpha=" << draw.params.alpha << " c=" << draw.params.c
      << " mass=" << draw.params.mass << " rounds=" << draw.rounds << "\n";
  char buf[64];
  for (const auto& a : draw.atoms) {
    auto res = std::to_chars(buf, buf + sizeof buf, a.weight);
    out << a.round << ' ' << a.index_in_round << ' ' << std::string_view(buf, res.ptr - buf) << ' '
        << a.atom_id << '\n';
  }
}

GammaProcessDraw read_draw(std::istream& in, const GammaProcessParams& params) {
  GammaProcessDraw draw{params, 0, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (auto pos = line.find("rounds="); pos != std::string::npos) {
        draw.rounds = std::max(draw.rounds, std::atoi(line.c_str() + pos + 7));
      }
      continue;
    }
    std::istringstream fields(line);
    WeightedAtom a;
    std::string weight;
    if (!(fields >> a.round >> a.index_in_round >> weight >> a.atom_id)) {
      throw ParseError("expected 'round index weight atom_id'", line_no);
    }
    auto res = std::from_chars(weight.data(), weight.data() + weight.size(), a.weight);
    if (res.ec != std::errc() || !(a.weight > 0.0) || a.round < 1 || a.index_in_round < 1) {
      throw ParseError("invalid atom record", line_no);
    }
    draw.rounds = std::max(draw.rounds, a.round);
    draw.atoms.push_back(a);
  }
  return draw;
}

}  // namespace gammaproc
