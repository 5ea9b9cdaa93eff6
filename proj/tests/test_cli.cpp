#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gammaproc/cli.hpp"
#include "gammaproc/io.hpp"

using namespace gammaproc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gammaproc");
  std::ostringstream out, err;
  int status = command_dispatch(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("gammaproc_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("bound") {
  Run r = run({"bound", "--n", "1000", "--alpha", "1", "--c", "1", "--gamma", "1", "--epsilon", "0.01"});
  CHECK(r.status == 0);
  CHECK(r.out == "17\n");
  Run b = run({"bound", "--n", "1000", "--alpha", "1", "--c", "1", "--gamma", "1", "--rounds", "16"});
  CHECK(b.status == 0);
  CHECK(std::stod(b.out) == doctest::Approx(0.01514296361).epsilon(1e-9));
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).status == 2);
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({"bound", "--n", "10", "--bogus", "1"}).status == 2);
  CHECK(run({"bound", "--n", "10", "--epsilon", "1.5"}).status == 2);
  CHECK(run({"fit-vi", "--count-update", "sideways"}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("generate is deterministic and records its configuration") {
  fs::path dir = scratch("generate");
  std::vector<std::string> args = {"generate", "--seed", "7", "--vocab", "12", "--docs", "30", "--gamma", "3"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", (dir / "a").string()});
  b.insert(b.end(), {"--out", (dir / "b").string()});
  REQUIRE(run(a).status == 0);
  REQUIRE(run(b).status == 0);
  std::string ua = slurp(dir / "a.uci"), ub = slurp(dir / "b.uci");
  CHECK(!ua.empty());
  CHECK(ua == ub);
  CHECK(slurp(dir / "a.truth") == slurp(dir / "b.truth"));
  CHECK(ua.rfind("#", 0) == 0);
  CHECK(ua.find("seed=7") != std::string::npos);
  Corpus c = parse_uci_bow(dir / "a.uci");
  CHECK(c.vocab_size() == 12);
  CHECK(c.n_docs() == 30);
  fs::remove_all(dir);
}

TEST_CASE("fit-vi, fit-mcmc and eval on a generated corpus") {
  fs::path dir = scratch("fit");
  REQUIRE(run({"generate", "--seed", "3", "--vocab", "15", "--docs", "40", "--gamma", "3", "--out",
               (dir / "d").string()})
              .status == 0);
  const std::string corpus = (dir / "d.uci").string();

  Run vi = run({"fit-vi", "--corpus", corpus, "--K", "6", "--rounds", "5", "--iters", "4", "--seed", "2", "--out",
                (dir / "vi").string()});
  CHECK(vi.status == 0);
  FitTrace t;
  {
    std::ifstream in(dir / "vi.trace.csv");
    t = read_trace(in);
  }
  CHECK(t.rows.size() >= 2);
  CHECK(t.rows[0].elbo.has_value());
  CHECK(slurp(dir / "vi.trace.csv").rfind("#", 0) == 0);

  Run mc = run({"fit-mcmc", "--corpus", corpus, "--K", "4", "--iters", "3", "--burn-in", "2", "--mc-samples", "20",
                "--seed", "2", "--out", (dir / "mc").string()});
  CHECK(mc.status == 0);
  {
    std::ifstream in(dir / "mc.trace.csv");
    FitTrace m = read_trace(in);
    CHECK(m.rows.size() == 3);
    for (const auto& row : m.rows) CHECK(!row.elbo.has_value());
  }

  // eval needs an explicit held-out file: write one cell of the corpus back out.
  Corpus full = parse_uci_bow(dir / "d.uci");
  Corpus one(full.vocab_size(), full.n_docs(), {full.entries()[0]});
  write_uci_bow(dir / "one.uci", one);
  Run ev = run({"eval", "--state", (dir / "vi.state").string(), "--test", (dir / "one.uci").string()});
  CHECK(ev.status == 0);
  REQUIRE(ev.out.rfind("heldout_loglik ", 0) == 0);
  CHECK(std::stod(ev.out.substr(15)) < 0);

  CHECK(run({"eval", "--state", (dir / "missing.state").string(), "--test", (dir / "one.uci").string()}).status != 0);
  fs::remove_all(dir);
}
