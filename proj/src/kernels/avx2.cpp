// Compiled with -mavx2; only reached after the dispatcher confirms CPU support.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels/table.hpp"

namespace gammaproc::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

// exp for arguments in (-inf, 0]. Cephes range reduction x = n ln2 + r with a
// (3,4) rational approximation on |r| <= ln2/2; lanes below -708 flush to 0.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lower = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(6.93145751953125e-1)));
  x = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(1.42860682030941723212e-6)));

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_add_pd(_mm256_mul_pd(p, xx), _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_add_pd(_mm256_mul_pd(p, xx), _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_add_pd(_mm256_mul_pd(q, xx), _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_add_pd(_mm256_mul_pd(q, xx), _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_add_pd(_mm256_mul_pd(q, xx), _mm256_set1_pd(2.00000000000000000009e0));
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(r, r));

  // 2^n from the exponent field.
  __m256i bits = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, r);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

inline __m256d affine_lane(const double* offset, __m256d va, const double* x, __m256d vb,
                           const double* y, std::size_t i) {
  __m256d v = _mm256_sub_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                            _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
  if (offset) v = _mm256_add_pd(_mm256_loadu_pd(offset + i), v);
  return v;
}

double affine_logsumexp_avx2(const double* offset, double a, const double* x, double b,
                             const double* y, std::size_t n) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);

  __m256d vmax = _mm256_set1_pd(neg_inf);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vmax = _mm256_max_pd(vmax, affine_lane(offset, va, x, vb, y, i));
  double peak = hmax(vmax);
  for (std::size_t j = i; j < n; ++j) {
    const double v = (offset ? offset[j] : 0.0) + a * x[j] - b * y[j];
    if (v > peak) peak = v;
  }
  if (peak == neg_inf) return neg_inf;

  const __m256d vpeak = _mm256_set1_pd(peak);
  __m256d acc = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, exp_nonpositive(_mm256_sub_pd(affine_lane(offset, va, x, vb, y, i), vpeak)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double v = (offset ? offset[i] : 0.0) + a * x[i] - b * y[i];
    s += std::exp(v - peak);
  }
  return peak + std::log(s);
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{sum_avx2, dot_avx2, axpy_avx2, affine_logsumexp_avx2};
  return table;
}

}  // namespace gammaproc::kernels::detail
