#pragma once

#include <cstdint>

#include "gammaproc/crm.hpp"
#include "gammaproc/numeric/rng.hpp"

namespace gammaproc {

struct TruncationQuery {
  std::uint64_t n_samples = 1;
  GammaProcessParams params;
  int rounds = 0;
};

/// Upper bound on (1/4) of the L1 distance between the data marginals under
/// the full and the round-truncated process:
///   1 - exp(-N * mass * (alpha / c) * (alpha / (1 + alpha))^R).
double marginal_truncation_bound(const TruncationQuery& q);

/// Smallest R >= 0 whose bound is <= epsilon. epsilon must lie in (0, 1).
int min_rounds_for_error(std::uint64_t n_samples, const GammaProcessParams& params, double epsilon);

/// Expected total weight in rounds after `rounds`: (mass alpha / c) (alpha/(1+alpha))^R.
double expected_residual_mass(const GammaProcessParams& params, int rounds);

struct TailEventEstimate {
  double probability = 0.0;  // Monte Carlo frequency plus the depth correction
  double std_error = 0.0;
  double depth_correction = 0.0;
  std::uint64_t replicates = 0;
};

/// Monte Carlo frequency of "some atom beyond round R receives a positive
/// Poisson count among N samples". Rounds R+1..R+extra_rounds are simulated;
/// the expected count mass beyond that depth is added as a union bound.
TailEventEstimate tail_event_frequency(const TruncationQuery& q, std::uint64_t replicates,
                                       int extra_rounds, const SeededRng& rng);

}  // namespace gammaproc
