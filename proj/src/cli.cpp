#include "gammaproc/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "gammaproc/crm.hpp"
#include "gammaproc/error.hpp"
#include "gammaproc/io.hpp"
#include "gammaproc/mcmc.hpp"
#include "gammaproc/model.hpp"
#include "gammaproc/truncation.hpp"
#include "gammaproc/validation.hpp"
#include "gammaproc/vi.hpp"

namespace gammaproc {

namespace {

constexpr int kUsage = 2;
constexpr int kFailure = 1;

struct Flags {
  std::uint64_t seed = 1;
  double alpha = 1.0, c = 1.0, gamma = 1.0;
  std::size_t K = 30;
  std::optional<int> rounds;
  double beta = 0.5;
  int iters = 100;
  int burn_in = 300;
  std::size_t mc_samples = 1000;
  double learning_rate = 1e-4;
  int grad_steps = 5;
  double zeta = 1.0;
  double train_frac = 0.8;
  std::string out;
  std::uint64_t n = 1;
  std::optional<double> epsilon;
  std::size_t vocab = 50, docs = 300;
  std::string corpus, test, state;
  std::string count_update = "literal";
  std::string t_entropy = "as-printed";
  bool quick = false;
};

// Resolved configuration, recorded at the top of every output file.
class Header {
 public:
  explicit Header(std::string command) { lines_.push_back("gammaproc " + command); }
  template <class T>
  Header& add(const std::string& key, const T& value) {
    std::ostringstream s;
    s.precision(17);
    s << key << '=' << value;
    lines_.push_back(s.str());
    return *this;
  }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

std::string ten_digits(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  writer(f);
  f.flush();
  if (!f) throw IoError("failed writing " + path);
}

CorpusSplit load_corpora(const Flags& f) {
  if (f.corpus.empty()) throw DomainError("--corpus is required");
  Corpus corpus = parse_uci_bow(std::filesystem::path(f.corpus));
  if (!f.test.empty()) {
    Corpus test = parse_uci_bow(std::filesystem::path(f.test));
    if (test.vocab_size() != corpus.vocab_size() || test.n_docs() != corpus.n_docs()) {
      throw DomainError("--test corpus must have the same D and W as --corpus");
    }
    return {std::move(corpus), std::move(test)};
  }
  return train_test_split(corpus, f.train_frac, SeededRng(f.seed).substream("split"));
}

GammaProcessParams prior(const Flags& f) {
  GammaProcessParams p{f.alpha, f.c, f.gamma};
  p.validate();
  return p;
}

int run_generate(const Flags& f, std::ostream& out) {
  if (f.out.empty()) throw DomainError("--out is required");
  const GammaProcessParams params = prior(f);
  const int rounds = f.rounds ? *f.rounds : min_rounds_for_error(f.docs, params, 0.01);
  const Hyperpriors hyper = Hyperpriors::symmetric(f.vocab, f.beta);
  const SyntheticCorpus data = generate_synthetic(params, hyper, f.vocab, f.docs, rounds, SeededRng(f.seed));
  Header h("generate");
  h.add("seed", f.seed).add("alpha", f.alpha).add("c", f.c).add("gamma", f.gamma).add("rounds", rounds);
  h.add("vocab", f.vocab).add("docs", f.docs).add("beta", f.beta);
  write_uci_bow(std::filesystem::path(f.out + ".uci"), data.corpus, h.lines());
  write_file(f.out + ".truth", [&](std::ostream& s) { write_state(s, data.truth, h.lines()); });
  out << "wrote " << f.out << ".uci (" << data.corpus.nnz() << " nonzeros, " << data.corpus.total_count()
      << " tokens) and " << f.out << ".truth (" << data.truth.draw.atoms.size() << " atoms)\n";
  return 0;
}

int run_bound(const Flags& f, std::ostream& out) {
  const GammaProcessParams params = prior(f);
  if (f.epsilon) {
    out << min_rounds_for_error(f.n, params, *f.epsilon) << '\n';
  } else if (f.rounds) {
    out << ten_digits(marginal_truncation_bound({f.n, params, *f.rounds})) << '\n';
  } else {
    throw DomainError("bound needs --epsilon or --rounds");
  }
  return 0;
}

int run_fit_vi(const Flags& f, std::ostream& out) {
  const CorpusSplit data = load_corpora(f);
  const Hyperpriors hyper = Hyperpriors::symmetric(data.train.vocab_size(), f.beta);
  ViConfig config;
  config.truncation_atoms = f.K;
  config.max_rounds = f.rounds ? *f.rounds : 20;
  config.learning_rate = f.learning_rate;
  config.grad_steps = f.grad_steps;
  config.zeta = f.zeta;
  config.max_iters = f.iters;
  config.seed = f.seed;
  config.count_update = f.count_update == "multiplicative" ? CountUpdate::multiplicative : CountUpdate::literal;
  config.t_entropy = f.t_entropy == "exact" ? TEntropy::exact : TEntropy::as_printed;
  const FitResult result = fit(data.train, data.test, hyper, config);

  Header h("fit-vi");
  h.add("corpus", f.corpus).add("test", f.test.empty() ? "(split)" : f.test).add("train_frac", f.train_frac);
  h.add("seed", f.seed).add("K", f.K).add("rounds", config.max_rounds).add("beta", f.beta).add("iters", f.iters);
  h.add("learning_rate", f.learning_rate).add("grad_steps", f.grad_steps).add("zeta", f.zeta);
  h.add("count_update", f.count_update).add("t_entropy", f.t_entropy);
  if (!f.out.empty()) {
    write_trace(std::filesystem::path(f.out + ".trace.csv"), result.trace, h.lines());
    write_file(f.out + ".state", [&](std::ostream& s) { write_state(s, result.state, h.lines()); });
  }
  const auto& last = result.trace.rows.back();
  out << "iterations " << last.iteration << (result.converged ? " (converged)" : "") << "\nelbo "
      << ten_digits(*last.elbo) << "\nheldout_loglik " << ten_digits(last.heldout) << '\n';
  return 0;
}

int run_fit_mcmc(const Flags& f, std::ostream& out) {
  const CorpusSplit data = load_corpora(f);
  const Hyperpriors hyper = Hyperpriors::symmetric(data.train.vocab_size(), f.beta);
  McConfig config;
  config.mc_samples = f.mc_samples;
  config.burn_in = f.burn_in;
  config.n_iters = f.iters;
  config.seed = f.seed;
  const ChainState init = initial_chain_state(data.train, hyper, prior(f), f.K, SeededRng(f.seed).substream("init"));
  const ChainResult result = run_chain(data.train, data.test, init, hyper, config);

  Header h("fit-mcmc");
  h.add("corpus", f.corpus).add("test", f.test.empty() ? "(split)" : f.test).add("train_frac", f.train_frac);
  h.add("seed", f.seed).add("K", f.K).add("alpha", f.alpha).add("c", f.c).add("gamma", f.gamma);
  h.add("beta", f.beta).add("iters", f.iters).add("burn_in", f.burn_in).add("mc_samples", f.mc_samples);
  if (!f.out.empty()) {
    write_trace(std::filesystem::path(f.out + ".trace.csv"), result.trace, h.lines());
    write_file(f.out + ".state", [&](std::ostream& s) { write_state(s, result.state, h.lines()); });
  }
  const ChainState& s = result.state;
  out << "sweeps " << f.burn_in + f.iters << "\natoms " << s.n_atoms() << "\nalpha " << ten_digits(s.alpha)
      << "\nc " << ten_digits(s.c) << "\ngamma " << ten_digits(s.gamma_mass) << '\n';
  if (!result.trace.rows.empty()) out << "heldout_loglik " << ten_digits(result.trace.rows.back().heldout) << '\n';
  return 0;
}

int run_eval(const Flags& f, std::ostream& out) {
  if (f.state.empty() || f.test.empty()) throw DomainError("eval needs --state and --test");
  const LoadedState s = read_state(std::filesystem::path(f.state));
  const Corpus test = parse_uci_bow(std::filesystem::path(f.test));
  out << "heldout_loglik " << ten_digits(heldout_per_word_loglik(test, s.loadings, s.counts)) << '\n';
  return 0;
}

int run_validate(const Flags& f, std::ostream& out) {
  ValidationOptions opt;
  opt.quick = f.quick;
  opt.seed = f.seed;
  if (!f.corpus.empty()) opt.real_corpus = f.corpus;
  opt.log = &out;
  out << "# gammaproc validate mode=" << (f.quick ? "quick" : "full") << " seed=" << f.seed << '\n';
  const auto results = run_validation(opt);
  const bool ok = all_passed(results);
  if (!ok) {
    out << "failed checks:\n";
    for (const auto& r : results) {
      if (r.gating && r.status == CheckStatus::fail) out << "  " << r.id << ' ' << r.name << ": " << r.observed << " (required " << r.required << ")\n";
    }
  }
  out << (ok ? "all checks passed\n" : "validation FAILED\n");
  return ok ? 0 : kFailure;
}

}  // namespace

int command_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gamma process stick-breaking, truncation bounds, and Gamma-Poisson factor model inference"};
  app.name(args.empty() ? "gammaproc" : args[0]);
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", f.seed, "random seed");
    s->add_option("--out", f.out, "output path prefix");
  };
  auto prior_flags = [&](CLI::App* s) {
    s->add_option("--alpha", f.alpha, "stick concentration alpha");
    s->add_option("--c", f.c, "rate concentration c");
    s->add_option("--gamma", f.gamma, "atoms per round (mass)");
  };
  auto data_flags = [&](CLI::App* s) {
    s->add_option("--corpus", f.corpus, "UCI bag-of-words corpus");
    s->add_option("--test", f.test, "held-out UCI corpus (otherwise --corpus is split)");
    s->add_option("--train-frac", f.train_frac, "token fraction kept for training");
    s->add_option("--beta", f.beta, "symmetric Dirichlet parameter of the loadings");
  };

  CLI::App* gen = app.add_subcommand("generate", "draw a synthetic corpus and its ground truth");
  common(gen);
  prior_flags(gen);
  gen->add_option("--rounds", f.rounds, "truncation rounds (default: error 0.01)");
  gen->add_option("--vocab", f.vocab, "vocabulary size");
  gen->add_option("--docs", f.docs, "number of documents");
  gen->add_option("--beta", f.beta, "symmetric Dirichlet parameter of the loadings");

  CLI::App* bound = app.add_subcommand("bound", "truncation error bound or minimal rounds");
  prior_flags(bound);
  bound->add_option("--n", f.n, "number of samples N");
  bound->add_option("--rounds", f.rounds, "truncation level R");
  bound->add_option("--epsilon", f.epsilon, "target error; prints the minimal R");

  CLI::App* vi = app.add_subcommand("fit-vi", "mean-field variational fit");
  common(vi);
  data_flags(vi);
  vi->add_option("--K", f.K, "truncation atoms");
  vi->add_option("--rounds", f.rounds, "largest round in q(d_k)");
  vi->add_option("--iters", f.iters, "maximum iterations");
  vi->add_option("--learning-rate", f.learning_rate, "step size for q(T_k)");
  vi->add_option("--grad-steps", f.grad_steps, "gradient steps per iteration");
  vi->add_option("--zeta", f.zeta, "round co-occupancy coupling");
  vi->add_option("--count-update", f.count_update, "literal or multiplicative")
      ->check(CLI::IsMember({"literal", "multiplicative"}));
  vi->add_option("--t-entropy", f.t_entropy, "as-printed or exact")->check(CLI::IsMember({"as-printed", "exact"}));

  CLI::App* mc = app.add_subcommand("fit-mcmc", "Gibbs sampler with MC-marginalized weights");
  common(mc);
  data_flags(mc);
  prior_flags(mc);
  mc->add_option("--K", f.K, "initial atoms");
  mc->add_option("--iters", f.iters, "post-burn-in sweeps");
  mc->add_option("--burn-in", f.burn_in, "burn-in sweeps");
  mc->add_option("--mc-samples", f.mc_samples, "weight samples S");

  CLI::App* ev = app.add_subcommand("eval", "held-out metric of a saved state");
  ev->add_option("--state", f.state, "state dump")->required();
  ev->add_option("--test", f.test, "held-out UCI corpus")->required();

  CLI::App* val = app.add_subcommand("validate", "run the statistical acceptance suite");
  val->add_flag("--quick", f.quick, "reduced replications");
  val->add_option("--seed", f.seed, "base seed");
  val->add_option("--corpus", f.corpus, "real UCI corpus for the stretch comparison");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (gen->parsed()) return run_generate(f, out);
    if (bound->parsed()) return run_bound(f, out);
    if (vi->parsed()) return run_fit_vi(f, out);
    if (mc->parsed()) return run_fit_mcmc(f, out);
    if (ev->parsed()) return run_eval(f, out);
    if (val->parsed()) return run_validate(f, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace gammaproc
