#include <cmath>
#include <limits>

#include "kernels/table.hpp"

namespace gammaproc::kernels::detail {

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double affine_logsumexp_scalar(const double* offset, double a, const double* x, double b,
                               const double* y, std::size_t n) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double peak = neg_inf;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (offset ? offset[i] : 0.0) + a * x[i] - b * y[i];
    if (v > peak) peak = v;
  }
  if (peak == neg_inf) return neg_inf;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (offset ? offset[i] : 0.0) + a * x[i] - b * y[i];
    s += std::exp(v - peak);
  }
  return peak + std::log(s);
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{sum_scalar, dot_scalar, axpy_scalar, affine_logsumexp_scalar};
  return table;
}

}  // namespace gammaproc::kernels::detail
