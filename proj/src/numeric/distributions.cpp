#include "gammaproc/numeric/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gammaproc/error.hpp"
#include "gammaproc/numeric/special.hpp"

namespace gammaproc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

double sample_exponential(double rate, SeededRng& rng) {
  require(positive_finite(rate), "Exponential: rate must be positive");
  return -std::log(rng.uniform()) / rate;
}

double sample_gamma(double shape, double rate, SeededRng& rng) {
  require(positive_finite(shape), "Gamma: shape must be positive");
  require(positive_finite(rate), "Gamma: rate must be positive");
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng) / rate;
}

double sample_beta(double a, double b, SeededRng& rng) {
  require(positive_finite(a) && positive_finite(b), "Beta: parameters must be positive");
  // Unit-parameter cases have exact inverse-CDF forms.
  if (b == 1.0) return std::pow(rng.uniform(), 1.0 / a);
  if (a == 1.0) return -std::expm1(std::log(rng.uniform()) / b);
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  return x / (x + y);
}

std::uint64_t sample_poisson(double mean, SeededRng& rng) {
  require(mean >= 0.0 && std::isfinite(mean), "Poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return static_cast<std::uint64_t>(dist(rng));
}

std::uint64_t sample_binomial(std::uint64_t trials, double p, SeededRng& rng) {
  require(p >= 0.0 && p <= 1.0, "Binomial: p must lie in [0, 1]");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(trials), p);
  return static_cast<std::uint64_t>(dist(rng));
}

std::vector<double> sample_dirichlet(std::span<const double> weights, SeededRng& rng) {
  require(!weights.empty(), "Dirichlet: empty weight vector");
  std::vector<double> out(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = sample_gamma(weights[i], 1.0, rng);
    total += out[i];
  }
  if (total == 0.0) {
    // Every gamma underflowed (all weights tiny): mass goes to one coordinate
    // chosen proportionally to the weights.
    std::vector<double> logw(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) logw[i] = std::log(weights[i]);
    std::fill(out.begin(), out.end(), 0.0);
    out[sample_log_categorical(logw, rng)] = 1.0;
    return out;
  }
  for (auto& x : out) x /= total;
  return out;
}

void sample_multinomial(std::uint64_t trials, std::span<const double> weights,
                        std::span<std::uint64_t> out, SeededRng& rng) {
  require(weights.size() == out.size(), "Multinomial: size mismatch");
  double remaining = 0.0;
  for (double w : weights) {
    require(w >= 0.0 && std::isfinite(w), "Multinomial: weights must be nonnegative");
    remaining += w;
  }
  std::fill(out.begin(), out.end(), 0);
  if (trials == 0) return;
  require(remaining > 0.0, "Multinomial: all weights are zero");
  std::uint64_t left = trials;
  for (std::size_t i = 0; i < weights.size() && left > 0; ++i) {
    if (i + 1 == weights.size() || weights[i] >= remaining) {
      out[i] = left;
      left = 0;
      break;
    }
    const double p = std::clamp(weights[i] / remaining, 0.0, 1.0);
    out[i] = sample_binomial(left, p, rng);
    left -= out[i];
    remaining -= weights[i];
  }
  if (left > 0) {
    // Trailing weights were all zero after rounding; give the rest to the last
    // positive-weight category.
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) {
        out[i] += left;
        break;
      }
    }
  }
}

std::size_t sample_log_categorical(std::span<const double> log_weights, SeededRng& rng) {
  require(!log_weights.empty(), "categorical: empty support");
  const double peak = *std::max_element(log_weights.begin(), log_weights.end());
  require(peak > -std::numeric_limits<double>::infinity() && !std::isnan(peak),
          "categorical: no positive weight");
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - peak);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    u -= std::exp(log_weights[i] - peak);
    if (u <= 0.0) return i;
  }
  // Rounding left a sliver; return the last positive-weight index.
  for (std::size_t i = log_weights.size(); i-- > 0;) {
    if (log_weights[i] > -std::numeric_limits<double>::infinity()) return i;
  }
  return log_weights.size() - 1;
}

double sample(const ContinuousDistribution& dist, SeededRng& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) return sample_exponential(d.rate, rng);
        if constexpr (std::is_same_v<T, GammaDist>) return sample_gamma(d.shape, d.rate, rng);
        if constexpr (std::is_same_v<T, BetaDist>) return sample_beta(d.a, d.b, rng);
      },
      dist);
}

double cdf(const ContinuousDistribution& dist, double x) {
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          require(positive_finite(d.rate), "Exponential: rate must be positive");
          return x <= 0.0 ? 0.0 : -std::expm1(-d.rate * x);
        }
        if constexpr (std::is_same_v<T, GammaDist>) return gamma_cdf(std::max(x, 0.0), d.shape, d.rate);
        if constexpr (std::is_same_v<T, BetaDist>) return beta_cdf(x, d.a, d.b);
      },
      dist);
}

double mean(const ContinuousDistribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) return 1.0 / d.rate;
        if constexpr (std::is_same_v<T, GammaDist>) return d.shape / d.rate;
        if constexpr (std::is_same_v<T, BetaDist>) return d.a / (d.a + d.b);
      },
      dist);
}

double variance(const ContinuousDistribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) return 1.0 / (d.rate * d.rate);
        if constexpr (std::is_same_v<T, GammaDist>) return d.shape / (d.rate * d.rate);
        if constexpr (std::is_same_v<T, BetaDist>) {
          const double s = d.a + d.b;
          return d.a * d.b / (s * s * (s + 1.0));
        }
      },
      dist);
}

}  // namespace gammaproc
