#pragma once

namespace gammaproc {

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// ψ(x) = d/dx ln Γ(x), x > 0.
double digamma(double x);

/// ψ′(x), x > 0.
double trigamma(double x);

/// Regularized lower incomplete gamma P(shape, rate·x): the Gamma(shape, rate)
/// CDF in rate parameterization.
double gamma_cdf(double x, double shape, double rate);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// I_x(a, b), the Beta(a, b) CDF.
double beta_cdf(double x, double a, double b);

/// log Poisson(k | mean); mean == 0 gives 0 for k == 0 and -inf otherwise.
double poisson_log_pmf(double k, double mean);

}  // namespace gammaproc
