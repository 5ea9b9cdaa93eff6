#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "gammaproc/numeric/rng.hpp"

namespace gammaproc {

// All rates are rate (inverse scale) parameters: Gamma(shape, rate) has mean
// shape / rate.

struct Exponential {
  double rate;
};

struct GammaDist {
  double shape;
  double rate;
};

struct BetaDist {
  double a;
  double b;
};

using ContinuousDistribution = std::variant<Exponential, GammaDist, BetaDist>;

double sample_exponential(double rate, SeededRng& rng);
double sample_gamma(double shape, double rate, SeededRng& rng);
double sample_beta(double a, double b, SeededRng& rng);
std::uint64_t sample_poisson(double mean, SeededRng& rng);
std::uint64_t sample_binomial(std::uint64_t trials, double p, SeededRng& rng);

/// Draw from Dirichlet(weights); the result sums to 1.
std::vector<double> sample_dirichlet(std::span<const double> weights, SeededRng& rng);

/// Split `trials` over categories with probabilities proportional to
/// `weights` (need not be normalized). `out` must have the same length.
void sample_multinomial(std::uint64_t trials, std::span<const double> weights,
                        std::span<std::uint64_t> out, SeededRng& rng);

/// Index drawn with probability proportional to exp(log_weights[i]).
std::size_t sample_log_categorical(std::span<const double> log_weights, SeededRng& rng);

double sample(const ContinuousDistribution& dist, SeededRng& rng);
double cdf(const ContinuousDistribution& dist, double x);
double mean(const ContinuousDistribution& dist);
double variance(const ContinuousDistribution& dist);

}  // namespace gammaproc
