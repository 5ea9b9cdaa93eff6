#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "gammaproc/numeric/distributions.hpp"

namespace gammaproc {

struct TestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// P(K > lambda) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double lambda);

TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);
TestReport ks_test(std::span<const double> samples, const ContinuousDistribution& dist);
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Pearson chi-square goodness of fit. `expected_probs` are cell
/// probabilities; cells whose expected count falls below `min_expected` are
/// pooled into their neighbour so the asymptotic law applies.
TestReport chi_square_gof(std::span<const double> observed, std::span<const double> expected_probs,
                          double min_expected = 5.0);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t count = 0;

  double std_error() const;
};

MomentSummary summarize(std::span<const double> values);

}  // namespace gammaproc
