#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gammaproc/error.hpp"
#include "gammaproc/kernels.hpp"
#include "gammaproc/numeric/rng.hpp"

using namespace gammaproc;
namespace kn = gammaproc::kernels;

namespace {

struct BackendGuard {
  kn::Backend saved = kn::active_backend();
  ~BackendGuard() { kn::set_backend(saved); }
};

std::vector<double> random_vec(std::size_t n, SeededRng& rng, double lo, double hi) {
  std::vector<double> x(n);
  for (double& v : x) v = lo + (hi - lo) * rng.uniform();
  return x;
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(kn::backend_available(kn::Backend::scalar));
  CHECK(kn::backend_name(kn::Backend::scalar) == "scalar");
  CHECK(kn::backend_name(kn::Backend::avx2) == "avx2");
}

TEST_CASE("vector kernels agree with the scalar reference") {
  if (!kn::backend_available(kn::Backend::avx2)) {
    MESSAGE("AVX2 not available; skipping");
    return;
  }
  BackendGuard guard;
  SeededRng rng(12);
  for (std::size_t n = 0; n <= 67; ++n) {
    CAPTURE(n);
    auto a = random_vec(n, rng, -2, 2);
    auto b = random_vec(n, rng, 0, 3);
    auto off = random_vec(n, rng, -5, 1);
    auto y0 = random_vec(n, rng, -1, 1);

    kn::set_backend(kn::Backend::scalar);
    double s = kn::sum(a), d = kn::dot(a, b);
    double l = kn::affine_logsumexp(1.3, a, 0.7, b);
    double sl = kn::shifted_affine_logsumexp(off, 1.3, a, 0.7, b);
    auto ys = y0;
    kn::axpy(0.25, a, ys);

    kn::set_backend(kn::Backend::avx2);
    double tol = 1e-13 * (1 + static_cast<double>(n));
    CHECK(std::abs(kn::sum(a) - s) <= tol);
    CHECK(std::abs(kn::dot(a, b) - d) <= tol * 4);
    auto yv = y0;
    kn::axpy(0.25, a, yv);
    CHECK(yv == ys);
    if (n == 0) {
      CHECK(std::isinf(l));
      CHECK(l < 0);
      CHECK(kn::affine_logsumexp(1.3, a, 0.7, b) == l);
      CHECK(kn::shifted_affine_logsumexp(off, 1.3, a, 0.7, b) == sl);
    } else {
      CHECK(std::abs(kn::affine_logsumexp(1.3, a, 0.7, b) - l) <= tol * (1 + std::abs(l)));
      CHECK(std::abs(kn::shifted_affine_logsumexp(off, 1.3, a, 0.7, b) - sl) <= tol * (1 + std::abs(sl)));
    }
  }
}

TEST_CASE("logsumexp edge cases on every backend") {
  BackendGuard guard;
  const double inf = std::numeric_limits<double>::infinity();
  for (auto be : {kn::Backend::scalar, kn::Backend::avx2}) {
    if (!kn::backend_available(be)) continue;
    kn::set_backend(be);
    CAPTURE(kn::backend_name(be));
    std::vector<double> big = {1000, 1000, 1000, 1000, 1000};
    std::vector<double> zero(5, 0.0);
    CHECK(kn::affine_logsumexp(1.0, big, 0.0, zero) == doctest::Approx(1000 + std::log(5.0)));
    std::vector<double> tiny = {-1000, -1001, -1002};
    std::vector<double> z3(3, 0.0);
    double want = -1000 + std::log1p(std::exp(-1.0) + std::exp(-2.0));
    CHECK(kn::affine_logsumexp(1.0, tiny, 0.0, z3) == doctest::Approx(want));
    std::vector<double> with_neg_inf = {-inf, 0.0, -inf};
    CHECK(kn::shifted_affine_logsumexp(with_neg_inf, 0.0, z3, 0.0, z3) == doctest::Approx(0.0));
    std::vector<double> all_neg_inf(9, -inf), z9(9, 0.0);
    double r = kn::shifted_affine_logsumexp(all_neg_inf, 1.0, z9, 1.0, z9);
    CHECK(std::isinf(r));
    CHECK(r < 0);
  }
}

TEST_CASE("selecting an unavailable backend throws") {
  if (kn::backend_available(kn::Backend::avx2)) return;
  CHECK_THROWS_AS(kn::set_backend(kn::Backend::avx2), DomainError);
}
