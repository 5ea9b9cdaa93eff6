#include "gammaproc/numeric/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "gammaproc/error.hpp"

namespace gammaproc {

namespace {

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  return boost::math::lgamma(x);
}

double digamma(double x) {
  require_positive(x, "digamma");
  return boost::math::digamma(x);
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  return boost::math::trigamma(x);
}

double gamma_cdf(double x, double shape, double rate) {
  require_positive(shape, "gamma_cdf(shape)");
  require_positive(rate, "gamma_cdf(rate)");
  if (std::isnan(x) || x < 0.0) throw DomainError("gamma_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(shape, rate * x);
}

double gamma_q(double a, double x) {
  require_positive(a, "gamma_q(a)");
  if (std::isnan(x) || x < 0.0) throw DomainError("gamma_q: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(a, x);
}

double beta_cdf(double x, double a, double b) {
  require_positive(a, "beta_cdf(a)");
  require_positive(b, "beta_cdf(b)");
  if (!(x > 0.0)) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double poisson_log_pmf(double k, double mean) {
  if (mean < 0.0 || k < 0.0) throw DomainError("poisson_log_pmf: negative argument");
  if (mean == 0.0) return k == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(mean) - mean - boost::math::lgamma(k + 1.0);
}

}  // namespace gammaproc
