#include "gammaproc/truncation.hpp"

#include <cmath>

#include "gammaproc/error.hpp"
#include "gammaproc/numeric/distributions.hpp"

namespace gammaproc {

namespace {

// log(N * mass * alpha / c * (alpha/(1+alpha))^R)
double log_exponent(std::uint64_t n, const GammaProcessParams& p, int rounds) {
  return std::log(static_cast<double>(n)) + std::log(p.mass) + std::log(p.alpha) - std::log(p.c) +
         rounds * (std::log(p.alpha) - std::log1p(p.alpha));
}

}  // namespace

double marginal_truncation_bound(const TruncationQuery& q) {
  q.params.validate();
  if (q.n_samples < 1) throw DomainError("truncation bound: n_samples must be at least 1");
  if (q.rounds < 0) throw DomainError("truncation bound: rounds must be nonnegative");
  return -std::expm1(-std::exp(log_exponent(q.n_samples, q.params, q.rounds)));
}

int min_rounds_for_error(std::uint64_t n_samples, const GammaProcessParams& params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("min_rounds_for_error: epsilon must lie in (0, 1)");
  params.validate();
  if (n_samples < 1) throw DomainError("min_rounds_for_error: n_samples must be at least 1");

  // bound <= eps  <=>  log_exponent(R) <= log(-log1p(-eps)); solve, then fix up
  // rounding by stepping on the exact predicate.
  const double target = std::log(-std::log1p(-epsilon));
  const double slope = std::log(params.alpha) - std::log1p(params.alpha);  // < 0
  const double r0 = (target - log_exponent(n_samples, params, 0)) / slope;
  int r = r0 <= 0.0 ? 0 : static_cast<int>(std::ceil(r0));
  auto bound = [&](int rounds) { return marginal_truncation_bound({n_samples, params, rounds}); };
  while (r > 0 && bound(r - 1) <= epsilon) --r;
  while (bound(r) > epsilon) ++r;
  return r;
}

double expected_residual_mass(const GammaProcessParams& params, int rounds) {
  if (rounds < 0) throw DomainError("expected_residual_mass: rounds must be nonnegative");
  params.validate();
  return params.mass * params.alpha / params.c *
         std::exp(rounds * (std::log(params.alpha) - std::log1p(params.alpha)));
}

TailEventEstimate tail_event_frequency(const TruncationQuery& q, std::uint64_t replicates,
                                       int extra_rounds, const SeededRng& rng) {
  q.params.validate();
  if (replicates == 0 || extra_rounds < 1) throw DomainError("tail_event_frequency: empty experiment");
  std::uint64_t hits = 0;
  const double n = static_cast<double>(q.n_samples);
  for (std::uint64_t rep = 0; rep < replicates; ++rep) {
    SeededRng rep_rng = rng.substream(rep);
    double tail = 0.0;
    for (int i = q.rounds + 1; i <= q.rounds + extra_rounds; ++i) {
      const auto count = sample_poisson(q.params.mass, rep_rng);
      for (std::uint64_t j = 0; j < count; ++j) {
        tail += draw_atom_weight(q.params, i, StickVariant::theorem, rep_rng);
      }
    }
    // Sum of the N * (tail atoms) independent Poisson counts.
    if (tail > 0.0 && sample_poisson(n * tail, rep_rng) > 0) ++hits;
  }
  TailEventEstimate est;
  est.replicates = replicates;
  const double p = static_cast<double>(hits) / static_cast<double>(replicates);
  est.depth_correction = n * expected_residual_mass(q.params, q.rounds + extra_rounds);
  est.probability = p + est.depth_correction;
  est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(replicates));
  return est;
}

}  // namespace gammaproc
