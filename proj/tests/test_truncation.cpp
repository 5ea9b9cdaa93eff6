#include <doctest.h>

#include <cmath>
#include <vector>

#include "gammaproc/crm.hpp"
#include "gammaproc/error.hpp"
#include "gammaproc/numeric/rng.hpp"
#include "gammaproc/numeric/stats.hpp"
#include "gammaproc/truncation.hpp"

using namespace gammaproc;

namespace {

double bound(std::uint64_t n, GammaProcessParams p, int r) { return marginal_truncation_bound({n, p, r}); }

}  // namespace

TEST_CASE("bound values") {
  GammaProcessParams unit{1, 1, 1};
  CHECK(bound(1, unit, 0) == doctest::Approx(0.6321205588).epsilon(1e-10));
  // 1 - exp(-1000 / 2^17), evaluated directly.
  CHECK(bound(1000, unit, 17) == doctest::Approx(-std::expm1(-1000.0 / 131072.0)).epsilon(1e-12));
  CHECK(bound(1000, unit, 17) == doctest::Approx(0.0076004).epsilon(1e-4));
  CHECK(bound(1000, unit, 16) == doctest::Approx(0.0151430).epsilon(1e-4));
  CHECK(bound(1000, unit, 17) < 0.01);
  CHECK(bound(1000, unit, 16) > 0.01);
  CHECK(bound(1000, unit, 2000) == 0.0);
  CHECK(bound(1000000000, {5, 1, 100}, 0) == 1.0);
}

TEST_CASE("bound is strictly decreasing in R until it underflows") {
  GammaProcessParams p{1, 1, 1};
  double prev = bound(10, p, 0);
  for (int r = 1; r < 60; ++r) {
    double b = bound(10, p, r);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("bound monotonicity on a parameter grid") {
  for (double alpha : {0.5, 1.0, 3.0}) {
    for (double c : {0.5, 2.0}) {
      for (double mass : {0.1, 1.0, 10.0}) {
        for (std::uint64_t n : {1ULL, 10ULL, 1000ULL}) {
          for (int r = 0; r < 25; ++r) {
            GammaProcessParams p{alpha, c, mass};
            double b = bound(n, p, r);
            CHECK(b >= 0.0);
            CHECK(b <= 1.0);
            CHECK(bound(n, p, r + 1) <= b);
            CHECK(bound(n * 2, p, r) >= b);
            CHECK(bound(n, {alpha, c, mass * 2}, r) >= b);
          }
        }
      }
    }
  }
}

TEST_CASE("min_rounds_for_error") {
  GammaProcessParams unit{1, 1, 1};
  CHECK(min_rounds_for_error(1000, unit, 0.01) == 17);
  CHECK(min_rounds_for_error(1, unit, 0.7) == 0);
  for (double eps : {0.9, 0.3, 0.01, 1e-5, 1e-12}) {
    for (GammaProcessParams p : {unit, GammaProcessParams{3, 0.5, 2}, GammaProcessParams{0.2, 1, 40}}) {
      for (std::uint64_t n : {1ULL, 300ULL, 1000000ULL}) {
        int r = min_rounds_for_error(n, p, eps);
        CHECK(r >= 0);
        CHECK(bound(n, p, r) <= eps);
        if (r >= 1) CHECK(bound(n, p, r - 1) > eps);
      }
    }
  }
  CHECK_THROWS_AS(min_rounds_for_error(10, unit, 0.0), DomainError);
  CHECK_THROWS_AS(min_rounds_for_error(10, unit, 1.0), DomainError);
  CHECK_THROWS_AS(min_rounds_for_error(0, unit, 0.5), DomainError);
}

TEST_CASE("expected residual mass") {
  GammaProcessParams p{1, 1, 5};
  CHECK(expected_residual_mass(p, 0) == doctest::Approx(expected_total_mass(p)));
  CHECK(expected_residual_mass(p, 30) == doctest::Approx(5.0 * std::ldexp(1.0, -30)).epsilon(1e-12));
  CHECK(expected_residual_mass(p, 30) == doctest::Approx(4.657e-9).epsilon(1e-3));
  CHECK_THROWS_AS(expected_residual_mass(p, -1), DomainError);
}

TEST_CASE("empirical residual mass beyond round 3") {
  GammaProcessParams p{1, 1, 5};
  SeededRng root(808);
  std::vector<double> residual(10000);
  for (std::size_t i = 0; i < residual.size(); ++i) {
    GammaProcessDraw d = draw_stick(p, 60, StickVariant::theorem, root.substream(i));
    double s = 0;
    for (const auto& a : d.atoms)
      if (a.round > 3) s += a.weight;
    residual[i] = s;
  }
  MomentSummary m = summarize(residual);
  CHECK(std::abs(m.mean - 0.625) <= 4 * m.std_error());
}

TEST_CASE("tail event frequency stays under the bound") {
  SeededRng root(909);
  GammaProcessParams unit{1, 1, 1};
  std::uint64_t label = 0;
  for (std::uint64_t n : {1ULL, 10ULL}) {
    for (int r : {1, 3, 5}) {
      CAPTURE(n);
      CAPTURE(r);
      TailEventEstimate est = tail_event_frequency({n, unit, r}, 20000, 60, root.substream(label++));
      CHECK(est.replicates == 20000);
      CHECK(est.depth_correction < 1e-15);
      CHECK(est.probability <= bound(n, unit, r) + 3 * est.std_error);
    }
  }
}
