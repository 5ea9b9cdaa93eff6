#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gammaproc/error.hpp"
#include "gammaproc/io.hpp"
#include "gammaproc/mcmc.hpp"
#include "gammaproc/numeric/rng.hpp"
#include "gammaproc/validation.hpp"

using namespace gammaproc;

namespace {

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_uci_bow(in);
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

Corpus random_corpus(SeededRng& rng) {
  std::size_t V = 1 + static_cast<std::size_t>(rng() % 40), N = 1 + static_cast<std::size_t>(rng() % 30);
  double density = rng.uniform();
  std::vector<CorpusEntry> e;
  for (std::uint32_t n = 0; n < N; ++n)
    for (std::uint32_t v = 0; v < V; ++v)
      if (rng.uniform() < density) e.push_back({v, n, 1 + rng() % 1000});
  return Corpus(V, N, e);
}

}  // namespace

TEST_CASE("UCI parsing") {
  Corpus c = parse("2\n3\n1\n1 2 5\n");
  CHECK(c.n_docs() == 2);
  CHECK(c.vocab_size() == 3);
  REQUIRE(c.nnz() == 1);
  CHECK(c.entries()[0] == CorpusEntry{1, 0, 5});

  CHECK(parse("# header note\n2\n\n3\n2\n# mid\n2 3 1\n1 1 4\n").nnz() == 2);
}

TEST_CASE("UCI parse errors carry line numbers") {
  struct Case {
    std::string text;
    std::size_t line;
  };
  const Case cases[] = {
      {"x\n3\n1\n1 1 1\n", 1},
      {"2\n3\n1\n3 1 1\n", 4},   // doc out of range
      {"2\n3\n1\n1 4 1\n", 4},   // word out of range
      {"2\n3\n2\n1 1 1\n1 1 2\n", 5},
      {"2\n3\n1\n1 1 0\n", 4},
      {"2\n3\n1\n1 1 -2\n", 4},
      {"2\n3\n1\n1 1\n", 4},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    try {
      (void)parse(c.text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == c.line);
    }
  }
  try {
    (void)parse("2\n3\n3\n1 1 1\n2 2 2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("header declares 3 entries, found 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_uci_bow(std::filesystem::path("/nonexistent/corpus.txt")), IoError);
}

TEST_CASE("UCI write then parse reproduces 100 random corpora") {
  SeededRng root(31);
  for (std::uint64_t i = 0; i < 100; ++i) {
    SeededRng rng = root.substream(i);
    Corpus c = random_corpus(rng);
    std::stringstream ss;
    write_uci_bow(ss, c, {"seed=" + std::to_string(i)});
    CHECK(ss.str().rfind("# seed=", 0) == 0);
    CHECK(parse_uci_bow(ss) == c);
  }
}

TEST_CASE("trace CSV") {
  const std::string header = "iteration,elapsed_seconds,elbo,heldout_loglik";
  SUBCASE("empty trace is header only") {
    std::stringstream ss;
    write_trace(ss, FitTrace{});
    CHECK(ss.str() == header + "\n");
    CHECK(read_trace(ss).rows.empty());
  }
  SUBCASE("three iterations, four lines, values to 10 digits") {
    FitTrace t;
    t.rows.push_back({1, 0.0123456789012, -1234.56789012345, -7.123456789012});
    t.rows.push_back({2, 0.5, std::nullopt, -7.25});
    t.rows.push_back({3, 1.75, 3.0e-12, std::numeric_limits<double>::quiet_NaN()});
    std::stringstream ss;
    write_trace(ss, t);
    std::string text = ss.str();
    CHECK(count_lines(text) == 4);
    CHECK(text.find("\n2,0.5,,-7.25\n") != std::string::npos);
    FitTrace back = read_trace(ss);
    REQUIRE(back.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back.rows[i].iteration == t.rows[i].iteration);
      CHECK(back.rows[i].elapsed_seconds == doctest::Approx(t.rows[i].elapsed_seconds).epsilon(1e-9));
      CHECK(back.rows[i].elbo.has_value() == t.rows[i].elbo.has_value());
      if (t.rows[i].elbo) CHECK(*back.rows[i].elbo == doctest::Approx(*t.rows[i].elbo).epsilon(1e-9));
    }
    CHECK(back.rows[0].heldout == doctest::Approx(-7.123456789).epsilon(1e-10));
    CHECK(std::isnan(back.rows[2].heldout));
  }
  SUBCASE("comment lines precede the header") {
    std::stringstream ss;
    write_trace(ss, FitTrace{}, {"seed=3"});
    CHECK(ss.str() == "# seed=3\n" + header + "\n");
    CHECK(read_trace(ss).rows.empty());
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(write_trace(std::filesystem::path("/nonexistent/dir/t.csv"), FitTrace{}), IoError);
  }
}

TEST_CASE("state dumps round-trip exactly") {
  SUBCASE("variational") {
    ViProblem p = random_vi_problem(SeededRng(41));
    std::stringstream ss;
    write_state(ss, p.state, {"note"});
    LoadedState back = read_state(ss);
    CHECK(back.kind == "vi");
    REQUIRE(back.vi.has_value());
    const VariationalState& v = *back.vi;
    CHECK(v.xi == p.state.xi);
    CHECK(v.eps == p.state.eps);
    CHECK(v.u == p.state.u);
    CHECK(v.v == p.state.v);
    CHECK(v.varphi == p.state.varphi);
    CHECK(v.lambda == p.state.lambda);
    CHECK(v.b == p.state.b);
    CHECK(v.kappa1 == p.state.kappa1);
    CHECK(v.tau2 == p.state.tau2);
    CHECK(v.rho1 == p.state.rho1);
    auto phi = p.state.expected_loadings();
    CHECK(std::equal(phi.values().begin(), phi.values().end(), back.loadings.values().begin()));
  }
  SUBCASE("chain") {
    ChainState s;
    s.rounds = {1, 1, 3};
    s.loadings = FactorLoadings(2, 3, {0.25, 0.75, 0.1, 0.9, 1.0 / 3, 2.0 / 3});
    s.z = FactorCounts(3, 2, {0, 4, 2, 1, 0, 0});
    s.alpha = 1.2345678901234567;
    s.c = 0.1;
    s.gamma_mass = 7.0 / 3;
    std::stringstream ss;
    write_state(ss, s);
    LoadedState back = read_state(ss);
    CHECK(back.kind == "chain");
    REQUIRE(back.chain.has_value());
    CHECK(back.chain->rounds == s.rounds);
    CHECK(back.chain->alpha == s.alpha);
    CHECK(back.chain->gamma_mass == s.gamma_mass);
    CHECK(std::equal(s.z.values().begin(), s.z.values().end(), back.counts.values().begin()));
    CHECK(std::equal(s.loadings.values().begin(), s.loadings.values().end(), back.loadings.values().begin()));
  }
  SUBCASE("malformed") {
    std::istringstream in("[model]\nkind=vi\nvocab_size=oops\n");
    CHECK_THROWS_AS(read_state(in), ParseError);
  }
}
