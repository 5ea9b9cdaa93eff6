#pragma once

#include <cstddef>

namespace gammaproc::kernels::detail {

struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // offset may be null.
  double (*affine_logsumexp)(const double* offset, double a, const double* x, double b,
                             const double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

#if defined(GAMMAPROC_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

}  // namespace gammaproc::kernels::detail
