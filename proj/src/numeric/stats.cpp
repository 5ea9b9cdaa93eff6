#include "gammaproc/numeric/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gammaproc/error.hpp"
#include "gammaproc/numeric/special.hpp"

namespace gammaproc {

namespace {

double ks_p_value(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return std::clamp(kolmogorov_survival((root + 0.12 + 0.11 / root) * d), 0.0, 1.0);
}

}  // namespace

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series converges slowly for small lambda; use the theta
  // function form there instead.
  if (lambda < 1.18) {
    const double y = std::exp(-1.2337005501361697 / (lambda * lambda));  // pi^2 / 8
    const double pref = 2.5066282746310002 / lambda;                      // sqrt(2 pi)
    const double cdf = pref * (y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_test: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n), sorted.size(), 0};
}

TestReport ks_test(std::span<const double> samples, const ContinuousDistribution& dist) {
  return ks_test(samples, [&dist](double x) { return cdf(dist, x); });
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return {d, ks_p_value(d, nx * ny / (nx + ny)), x.size(), y.size()};
}

TestReport chi_square_gof(std::span<const double> observed, std::span<const double> expected_probs,
                          double min_expected) {
  if (observed.size() != expected_probs.size() || observed.empty()) {
    throw DomainError("chi_square_gof: observed and expected sizes differ");
  }
  double total = 0.0;
  for (double o : observed) total += o;
  if (total <= 0.0) throw DomainError("chi_square_gof: no observations");

  // Pool adjacent cells left to right until each pooled cell has enough
  // expected mass; the final partial pool merges into the previous cell.
  std::vector<double> obs;
  std::vector<double> exp;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected_probs[i] * total;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  if (exp.size() < 2) return {0.0, 1.0, static_cast<std::size_t>(total), 0};

  double stat = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    if (exp[i] <= 0.0) {
      if (obs[i] > 0.0) return {std::numeric_limits<double>::infinity(), 0.0, static_cast<std::size_t>(total), 0};
      continue;
    }
    const double diff = obs[i] - exp[i];
    stat += diff * diff / exp[i];
  }
  const double dof = static_cast<double>(exp.size() - 1);
  return {stat, gamma_q(dof / 2.0, stat / 2.0), static_cast<std::size_t>(total), 0};
}

double MomentSummary::std_error() const {
  return count == 0 ? 0.0 : std::sqrt(variance / static_cast<double>(count));
}

MomentSummary summarize(std::span<const double> values) {
  MomentSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  // Welford.
  double m = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : values) {
    ++k;
    const double delta = x - m;
    m += delta / static_cast<double>(k);
    m2 += delta * (x - m);
  }
  s.mean = m;
  s.variance = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
  return s;
}

}  // namespace gammaproc
