#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gammaproc/error.hpp"
#include "gammaproc/model.hpp"
#include "gammaproc/numeric/distributions.hpp"
#include "gammaproc/numeric/rng.hpp"
#include "gammaproc/numeric/special.hpp"
#include "gammaproc/numeric/stats.hpp"
#include "gammaproc/validation.hpp"
#include "gammaproc/vi.hpp"

using namespace gammaproc;

namespace {

// Uniform everything: xi = eps = u = v = 1, uniform rounds, unit globals.
VariationalState blank_state(std::size_t K, int R, std::size_t N, std::size_t V) {
  VariationalState s;
  s.n_atoms = K;
  s.max_rounds = R;
  s.n_docs = N;
  s.vocab_size = V;
  s.xi.assign(K, 1.0);
  s.eps.assign(K, 1.0);
  s.u.assign(K, 1.0);
  s.v.assign(K, 1.0);
  s.varphi.assign(K * R, 1.0 / R);
  s.lambda.assign(K * N, 0.0);
  s.b.assign(K * V, 1.0);
  return s;
}

void point_mass(VariationalState& s, std::size_t k, int r) {
  for (int j = 1; j <= s.max_rounds; ++j) s.round_prob(k, j) = j == r ? 1.0 : 0.0;
}

DataAggregates aggregates(std::size_t N, std::size_t V) {
  DataAggregates d;
  d.n_docs = N;
  d.doc_lengths.assign(N, 0.0);
  d.word_totals.assign(V, 0.0);
  return d;
}

// The round update written out directly, with no shared helpers.
std::vector<double> reference_rounds(const VariationalState& s, double zeta) {
  const std::size_t K = s.n_atoms;
  const int R = s.max_rounds;
  std::vector<double> out(K * R);
  double e_log_alpha = digamma(s.kappa1) - std::log(s.kappa2);
  double e_mass = s.tau1 / s.tau2;
  for (std::size_t k = 0; k < K; ++k) {
    double e_log_t = digamma(s.u[k]) - std::log(s.v[k]);
    std::vector<double> lw(R);
    for (int r = 1; r <= R; ++r) {
      double others = 0;
      for (std::size_t i = 0; i < K; ++i)
        if (i != k) others += s.round_prob(i, r);
      double interaction = 0;
      for (int j = 2; j <= r; ++j) {
        double prod = 1;
        for (std::size_t kp = 0; kp < K; ++kp) {
          if (kp == k) continue;
          double below = 0;
          for (int rp = 1; rp < j; ++rp) below += s.round_prob(kp, rp);
          prod *= below;
        }
        interaction += prod;
      }
      lw[r - 1] = r * e_log_alpha - std::lgamma(static_cast<double>(r)) + (r - 1) * e_log_t - zeta * others -
                  e_mass * interaction;
    }
    double mx = lw[0];
    for (double x : lw) mx = std::max(mx, x);
    double z = 0;
    for (double& x : lw) z += (x = std::exp(x - mx));
    for (int r = 0; r < R; ++r) out[k * R + r] = lw[r] / z;
  }
  return out;
}

}  // namespace

TEST_CASE("q_moments") {
  VariationalState s = blank_state(1, 2, 0, 1);
  CHECK(q_moments(s, 0).mean_exp_neg_T == doctest::Approx(0.5));
  s.xi[0] = 2;
  s.eps[0] = 4;
  s.kappa1 = 3;
  s.kappa2 = 2;
  s.rho1 = 5;
  s.rho2 = 4;
  s.tau1 = 7;
  s.tau2 = 2;
  point_mass(s, 0, 2);
  MomentBundle m = q_moments(s, 0);
  CHECK(m.mean_E == doctest::Approx(0.5));
  CHECK(m.mean_log_E == doctest::Approx(digamma(2) - std::log(4.0)));
  CHECK(m.mean_alpha == doctest::Approx(1.5));
  CHECK(m.mean_log_alpha == doctest::Approx(digamma(3) - std::log(2.0)));
  CHECK(m.mean_c == doctest::Approx(1.25));
  CHECK(m.mean_mass == doctest::Approx(3.5));
  CHECK(m.mean_round_minus_one == doctest::Approx(1.0));
}

TEST_CASE("E[exp(-T)] agrees with Monte Carlo at (3, 0.7)") {
  VariationalState s = blank_state(1, 1, 0, 1);
  s.u[0] = 3;
  s.v[0] = 0.7;
  double closed = q_moments(s, 0).mean_exp_neg_T;
  CHECK(closed == doctest::Approx(std::pow(0.7 / 1.7, 3)));
  SeededRng rng(21);
  std::vector<double> xs(100000);
  for (double& x : xs) x = std::exp(-sample_gamma(3, 0.7, rng));
  MomentSummary m = summarize(xs);
  CHECK(std::abs(m.mean - closed) <= 4 * m.std_error());
}

TEST_CASE("update_E") {
  SUBCASE("all lambda zero gives xi = 1") {
    VariationalState s = blank_state(3, 2, 4, 2);
    update_E(s, aggregates(4, 2));
    for (double x : s.xi) CHECK(x == 1.0);
  }
  SUBCASE("eps = E[c] + N E[exp(-T)]") {
    VariationalState s = blank_state(1, 2, 10, 2);
    s.rho1 = 2;
    s.rho2 = 1;
    update_E(s, aggregates(10, 2));
    CHECK(s.eps[0] == doctest::Approx(7.0));
  }
  SUBCASE("ten unit lambdas give xi = 11") {
    VariationalState s = blank_state(1, 2, 10, 2);
    s.lambda.assign(10, 1.0);
    update_E(s, aggregates(10, 2));
    CHECK(s.xi[0] == doctest::Approx(11.0));
  }
}

TEST_CASE("update_global") {
  Hyperpriors h;
  h.beta = {1.0};
  SUBCASE("kappa1 with two atoms in round 1") {
    VariationalState s = blank_state(2, 3, 1, 1);
    point_mass(s, 0, 1);
    point_mass(s, 1, 1);
    update_global(s, h);
    CHECK(s.kappa1 == doctest::Approx(3.0));
    CHECK(s.tau2 == doctest::Approx(2.0));
  }
  SUBCASE("rho1 = c1 + K") {
    VariationalState s = blank_state(5, 2, 1, 1);
    update_global(s, h);
    CHECK(s.rho1 == doctest::Approx(6.0));
    CHECK(s.tau1 == doctest::Approx(6.0));
  }
  SUBCASE("kappa2, rho2 sums") {
    VariationalState s = blank_state(2, 2, 1, 1);
    s.u = {2, 3};
    s.v = {1, 2};
    s.xi = {1, 4};
    s.eps = {2, 2};
    update_global(s, h);
    CHECK(s.kappa2 == doctest::Approx(1 + 2 + 1.5));
    CHECK(s.rho2 == doctest::Approx(1 + 0.5 + 2));
  }
}

TEST_CASE("update_rounds") {
  ViConfig cfg;
  SUBCASE("a single round is a point mass") {
    VariationalState s = blank_state(3, 1, 1, 1);
    update_rounds(s, cfg);
    for (double p : s.varphi) CHECK(p == 1.0);
  }
  SUBCASE("one atom with zero expectations splits evenly over two rounds") {
    VariationalState s = blank_state(1, 2, 1, 1);
    // E[log alpha] = psi(kappa1) - log kappa2 = 0 and E[log T] = 0 need psi(x) = log y.
    s.kappa1 = 1;
    s.kappa2 = std::exp(digamma(1.0));
    s.u[0] = 1;
    s.v[0] = std::exp(digamma(1.0));
    s.tau1 = 1e-300;
    s.tau2 = 1;
    update_rounds(s, cfg);
    CHECK(s.round_prob(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.round_prob(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("matches a straight-line reimplementation") {
    SeededRng root(55);
    for (std::uint64_t i = 0; i < 20; ++i) {
      ViProblem p = random_vi_problem(root.substream(i), 5, 7);
      auto want = reference_rounds(p.state, p.config.zeta);
      update_rounds(p.state, p.config);
      for (std::size_t j = 0; j < want.size(); ++j) CHECK(std::abs(p.state.varphi[j] - want[j]) <= 1e-12);
      p.state.validate();
    }
  }
  SUBCASE("normalization survives log weights far outside the exp range") {
    ViProblem p = random_vi_problem(SeededRng(66), 3, 4);
    p.state.kappa2 = 1e-300;  // E[log alpha] near 690, so r E[log alpha] reaches ~2800
    auto ref = reference_rounds(p.state, p.config.zeta);
    update_rounds(p.state, p.config);
    for (std::size_t j = 0; j < ref.size(); ++j) {
      CHECK(std::isfinite(p.state.varphi[j]));
      CHECK(std::abs(p.state.varphi[j] - ref[j]) <= 1e-12);
    }
    p.state.validate();
  }
}

TEST_CASE("grad_T closed-form values") {
  SUBCASE("du = -2") {
    VariationalState s = blank_state(1, 3, 0, 1);
    point_mass(s, 0, 1);
    TGradient g = grad_T(s, aggregates(0, 1), 0);
    CHECK(g.du == doctest::Approx(-2.0));
  }
  SUBCASE("dv = 0") {
    VariationalState s = blank_state(1, 3, 0, 1);
    point_mass(s, 0, 1);
    s.kappa1 = 2;
    s.kappa2 = 1;
    s.v[0] = 2;
    TGradient g = grad_T(s, aggregates(0, 1), 0);
    CHECK(std::abs(g.dv) <= 1e-15);
  }
}

TEST_CASE("grad_T agrees with finite differences of the bound") {
  SeededRng root(99);
  for (std::uint64_t i = 0; i < 20; ++i) {
    CAPTURE(i);
    CHECK(gradient_check(random_vi_problem(root.substream(i))) <= 1e-4);
  }
  ViProblem p = random_vi_problem(root.substream(1000));
  p.config.t_entropy = TEntropy::exact;
  CHECK(gradient_check(p) <= 1e-4);
}

TEST_CASE("ascend_T") {
  ViProblem p = random_vi_problem(SeededRng(5));
  DataAggregates data = DataAggregates::from(p.corpus);
  SUBCASE("one step is u + eta g") {
    ViConfig cfg = p.config;
    cfg.grad_steps = 1;
    cfg.learning_rate = 1e-3;
    VariationalState s = p.state;
    std::vector<TGradient> g;
    for (std::size_t k = 0; k < s.n_atoms; ++k) g.push_back(grad_T(s, data, k, cfg.t_entropy));
    // Atoms do not interact through the T gradient, so sequential order does not matter.
    ascend_T(s, data, cfg);
    for (std::size_t k = 0; k < s.n_atoms; ++k) {
      CHECK(s.u[k] == p.state.u[k] + cfg.learning_rate * g[k].du);
      CHECK(s.v[k] == p.state.v[k] + cfg.learning_rate * g[k].dv);
    }
  }
  SUBCASE("steps that cross zero are clamped") {
    // du = -2 here, so one unit step would land at u = -1.
    VariationalState s = blank_state(1, 2, 0, 1);
    point_mass(s, 0, 1);
    ViConfig cfg;
    cfg.learning_rate = 1.0;
    cfg.grad_steps = 1;
    ascend_T(s, aggregates(0, 1), cfg);
    CHECK(s.u[0] == 1e-6);
    CHECK(s.v[0] == 1.0);  // dv = 1 - 1 = 0
  }
  SUBCASE("a stationary point does not move") {
    // With N = 0, rounds at 1 and the exact entropy, du = -E[alpha]/v + 1 - (u-1) psi'(u)
    // and dv = E[alpha] u / v^2 - 1/v; u = 1, v = E[alpha] = 1 zeroes both.
    VariationalState s = blank_state(1, 2, 0, 1);
    point_mass(s, 0, 1);
    ViConfig cfg;
    cfg.t_entropy = TEntropy::exact;
    TGradient g = grad_T(s, aggregates(0, 1), 0, TEntropy::exact);
    CHECK(g.du == 0.0);
    CHECK(g.dv == 0.0);
    ascend_T(s, aggregates(0, 1), cfg);
    CHECK(s.u[0] == 1.0);
    CHECK(s.v[0] == 1.0);
  }
}

TEST_CASE("update_loadings") {
  Hyperpriors h;
  h.beta = {0.3, 1.0, 2.5};
  SUBCASE("no data and zero lambda returns beta") {
    VariationalState s = blank_state(2, 2, 3, 3);
    update_loadings(s, aggregates(3, 3), h);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t v = 0; v < 3; ++v) CHECK(s.b_at(v, k) == h.beta[v]);
  }
  SUBCASE("b = -sum lambda + sum d + beta, floored") {
    VariationalState s = blank_state(1, 2, 2, 3);
    s.lambda = {1.5, 2.5};
    DataAggregates d = aggregates(2, 3);
    d.word_totals = {10, 0, 1};
    update_loadings(s, d, h);
    CHECK(s.b_at(0, 0) == doctest::Approx(10 - 4 + 0.3));
    CHECK(s.b_at(1, 0) == 1e-6);
    CHECK(s.b_at(2, 0) == 1e-6);
    Hyperpriors unit;
    unit.beta = {1.0, 1.0, 1.0};
    d.word_totals = {10, 0, 0};
    update_loadings(s, d, unit);
    CHECK(s.b_at(0, 0) == doctest::Approx(7.0));
  }
}

TEST_CASE("update_counts") {
  SUBCASE("literal: zero-length document with E[log E] = 0 and E[T] = 3") {
    VariationalState s = blank_state(1, 2, 2, 2);
    s.xi[0] = 1;
    s.eps[0] = std::exp(digamma(1.0));
    s.u[0] = 3;
    s.v[0] = 1;
    Corpus c(2, 2, {{0, 1, 4}});
    ViConfig cfg;
    update_counts(s, c, cfg);
    CHECK(s.lambda_at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.lambda_at(0, 1) == 1e-8);  // 2 - 4 < 0
  }
  SUBCASE("both modes keep the state valid") {
    SeededRng root(8);
    for (auto mode : {CountUpdate::literal, CountUpdate::multiplicative}) {
      for (std::uint64_t i = 0; i < 10; ++i) {
        ViProblem p = random_vi_problem(root.substream(i));
        p.config.count_update = mode;
        VariationalState before = p.state;
        update_counts(p.state, p.corpus, p.config);
        p.state.validate();
        for (double l : p.state.lambda) CHECK(l >= 1e-8);
        CHECK(p.state.lambda != before.lambda);
      }
    }
    ViProblem p = random_vi_problem(root.substream(77));
    VariationalState a = p.state, b = p.state;
    ViConfig lit = p.config, mult = p.config;
    lit.count_update = CountUpdate::literal;
    mult.count_update = CountUpdate::multiplicative;
    update_counts(a, p.corpus, lit);
    update_counts(b, p.corpus, mult);
    CHECK(a.lambda != b.lambda);
  }
}

TEST_CASE("every update preserves the state invariants") {
  SeededRng root(123);
  for (std::uint64_t i = 0; i < 10; ++i) {
    ViProblem p = random_vi_problem(root.substream(i));
    DataAggregates data = DataAggregates::from(p.corpus);
    update_counts(p.state, p.corpus, p.config);
    p.state.validate();
    update_loadings(p.state, data, p.hyper);
    p.state.validate();
    update_E(p.state, data);
    p.state.validate();
    ascend_T(p.state, data, p.config);
    p.state.validate();
    update_rounds(p.state, p.config);
    p.state.validate();
    update_global(p.state, p.hyper);
    p.state.validate();
  }
}

TEST_CASE("ELBO determinism and closed-form ascent") {
  SeededRng root(4321);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CAPTURE(i);
    ViProblem p = random_vi_problem(root.substream(i));
    DataAggregates data = DataAggregates::from(p.corpus);
    double before = elbo(p.state, p.corpus, p.hyper, p.config);
    VariationalState copy = p.state;
    CHECK(elbo(copy, p.corpus, p.hyper, p.config) == before);

    VariationalState e = p.state;
    update_E(e, data);
    CHECK(elbo(e, p.corpus, p.hyper, p.config) >= before - 1e-8);

    VariationalState g = p.state;
    update_global(g, p.hyper);
    CHECK(elbo(g, p.corpus, p.hyper, p.config) >= before - 1e-8);
  }
}

TEST_CASE("ELBO terms are finite and sum to the total") {
  ViProblem p = random_vi_problem(SeededRng(2));
  ElboTerms t = elbo_terms(p.state, p.corpus, p.hyper, p.config);
  CHECK(t.first_non_finite().empty());
  CHECK(t.total() == elbo(p.state, p.corpus, p.hyper, p.config));
  t.data = std::numeric_limits<double>::quiet_NaN();
  CHECK(t.first_non_finite() == "data");
}

TEST_CASE("fit") {
  Hyperpriors hyper = Hyperpriors::symmetric(20, 0.5);
  SyntheticCorpus s = generate_synthetic({1, 1, 4}, hyper, 20, 80, 10, SeededRng(10));
  CorpusSplit split = train_test_split(s.corpus, 0.8, SeededRng(11));
  ViConfig cfg;
  cfg.truncation_atoms = 8;
  cfg.max_rounds = 6;

  SUBCASE("zero iterations evaluates only the initial state") {
    cfg.max_iters = 0;
    FitResult r = fit(split.train, split.test, hyper, cfg);
    REQUIRE(r.trace.rows.size() == 1);
    CHECK(r.trace.rows[0].iteration == 0);
    CHECK(r.trace.rows[0].elbo.has_value());
    VariationalState init = initialize_state(split.train, hyper, cfg);
    CHECK(r.state.lambda == init.lambda);
    CHECK(r.state.b == init.b);
    CHECK(r.state.varphi == init.varphi);
  }
  SUBCASE("repeat runs are bit-identical") {
    cfg.max_iters = 6;
    FitResult a = fit(split.train, split.test, hyper, cfg);
    FitResult b = fit(split.train, split.test, hyper, cfg);
    REQUIRE(a.trace.rows.size() == b.trace.rows.size());
    for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
      CHECK(a.trace.rows[i].iteration == static_cast<int>(i));
      CHECK(*a.trace.rows[i].elbo == *b.trace.rows[i].elbo);
      CHECK(a.trace.rows[i].heldout == b.trace.rows[i].heldout);
      if (i > 0) CHECK(a.trace.rows[i].elapsed_seconds >= a.trace.rows[i - 1].elapsed_seconds);
    }
    CHECK(a.state.lambda == b.state.lambda);
    CHECK(a.state.b == b.state.b);
  }
  SUBCASE("initial state") {
    VariationalState init = initialize_state(split.train, hyper, cfg);
    init.validate();
    auto lengths = split.train.doc_lengths();
    for (std::size_t k = 0; k < init.n_atoms; ++k) {
      CHECK(init.xi[k] == 1.0);
      CHECK(init.u[k] == 1.0);
      for (std::size_t n = 0; n < init.n_docs; ++n) CHECK(init.lambda_at(k, n) == lengths[n] / 8.0);
      for (std::size_t v = 0; v < init.vocab_size; ++v) {
        CHECK(init.b_at(v, k) >= 0.5);
        CHECK(init.b_at(v, k) <= 0.6);
      }
    }
  }
  SUBCASE("a divergent run reports its iteration") {
    cfg.max_iters = 5;
    cfg.learning_rate = 1e300;
    bool threw = false;
    try {
      (void)fit(split.train, split.test, hyper, cfg);
    } catch (const FitError& e) {
      threw = true;
      CHECK(e.iteration() >= 1);
      CHECK(e.iteration() <= 5);
    }
    CHECK(threw);
  }
  SUBCASE("bad inputs") {
    CHECK_THROWS_AS(fit(Corpus(20, 80, {}), split.test, hyper, cfg), DomainError);
    CHECK_THROWS_AS(fit(split.train, Corpus(21, 80, {}), hyper, cfg), DomainError);
  }
}
