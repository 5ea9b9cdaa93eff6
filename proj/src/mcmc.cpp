#include "gammaproc/mcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "gammaproc/error.hpp"
#include "gammaproc/kernels.hpp"
#include "gammaproc/numeric/distributions.hpp"
#include "gammaproc/numeric/special.hpp"

namespace gammaproc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_count(double x) { return std::isfinite(x) && x >= 0.0 && x == std::floor(x); }

double log_factorial(double z) { return std::lgamma(z + 1.0); }


void reject_nan(double value, const char* where) {
  if (std::isnan(value)) throw SamplingError(std::string("NaN posterior weight in ") + where);
}

}  // namespace

void ChainState::validate() const {
  const std::size_t K = rounds.size();
  if (z.n_factors() != K || loadings.n_factors() != K) throw DomainError("chain state has inconsistent atom counts");
  for (double x : z.values()) {
    if (!is_count(x)) throw DomainError("chain counts must be nonnegative integers");
  }
  loadings.validate(1e-9);
  for (std::size_t k = 0; k < K; ++k) {
    if (rounds[k] < 1) throw DomainError("round indicators must be at least 1");
    if (k > 0 && rounds[k] < rounds[k - 1]) throw DomainError("round indicators must be nondecreasing");
  }
  for (double x : {alpha, c, gamma_mass}) {
    if (!std::isfinite(x) || x <= 0.0) throw DomainError("chain hyperparameters must be positive");
  }
}

void McConfig::validate() const {
  if (mc_samples < 1) throw DomainError("mc_samples must be at least 1");
  if (!(grid_step_alpha > 0.0) || !(grid_step_c > 0.0)) throw DomainError("grid steps must be positive");
  if (!(tail_threshold > 0.0 && tail_threshold < 1.0)) throw DomainError("tail_threshold must lie in (0, 1)");
  if (burn_in < 0 || n_iters < 0) throw DomainError("sweep counts must be nonnegative");
  if (!(gamma_prior_shape > 0.0) || !(gamma_prior_rate > 0.0)) throw DomainError("gamma prior must be positive");
  if (max_grid_steps < 1 || max_round_candidates < 1) throw DomainError("search limits must be positive");
}

WeightSamples WeightSamples::draw(int round, double alpha, double c, std::size_t count, SeededRng& rng) {
  if (round < 1) throw DomainError("round must be at least 1");
  if (count < 1) throw DomainError("at least one weight sample is required");
  WeightSamples w;
  w.log_g.resize(count);
  w.g.resize(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double e = sample_exponential(c, rng);
    const double t = sample_gamma(round, alpha, rng);
    w.log_g[s] = std::log(e) - t;
    w.g[s] = std::exp(w.log_g[s]);
  }
  return w;
}

WeightSamples WeightSamples::point_mass(double weight, std::size_t count) {
  if (!(weight > 0.0)) throw DomainError("weight must be positive");
  return {std::vector<double>(count, std::log(weight)), std::vector<double>(count, weight)};
}

double mc_marginal_loglik(const WeightSamples& samples, double z_sum, std::size_t n_docs, double log_factorial_sum) {
  if (samples.size() == 0) throw DomainError("no weight samples");
  return kernels::affine_logsumexp(z_sum, samples.log_g, static_cast<double>(n_docs), samples.g) -
         std::log(static_cast<double>(samples.size())) - log_factorial_sum;
}

double mc_marginal_loglik(std::span<const double> z_col, int round, double alpha, double c, std::size_t samples,
                          SeededRng& rng) {
  double z_sum = 0.0, lfs = 0.0;
  for (double z : z_col) {
    if (!is_count(z)) throw DomainError("counts must be nonnegative integers");
    z_sum += z;
    lfs += log_factorial(z);
  }
  const WeightSamples w = WeightSamples::draw(round, alpha, c, samples, rng);
  return mc_marginal_loglik(w, z_sum, z_col.size(), lfs);
}

double round_log_prior(int round, int prev_round, int prev_run, double gamma_mass) {
  if (!(gamma_mass > 0.0) || !std::isfinite(gamma_mass)) throw DomainError("gamma_mass must be positive");
  const double log_advance = std::log(-std::expm1(-gamma_mass));  // log(1 - Pois(0))
  if (prev_round == 0) {
    if (round < 1) return kNegInf;
    return log_advance - (round - 1) * gamma_mass;
  }
  if (prev_round < 0 || prev_run < 1) throw DomainError("previous round and run length must be positive");
  if (round < prev_round) return kNegInf;
  // 1 - sum_{t=1}^{D} Pois(t) = Pois(0) + P(X > D), and P(X > D) = P(D + 1, mass).
  const double D = prev_run;
  const double p0 = std::exp(-gamma_mass);
  const double denom = p0 + gamma_cdf(gamma_mass, D, 1.0);
  if (round == prev_round) return std::log(p0 + gamma_cdf(gamma_mass, D + 1.0, 1.0)) - std::log(denom);
  // 1 - same = Pois(D) / denom
  const int h = round - prev_round;
  return poisson_log_pmf(D, gamma_mass) - std::log(denom) + log_advance - (h - 1) * gamma_mass;
}

int sample_round(int prev_round, int prev_run, std::optional<int> next_round, double gamma_mass,
                 const std::function<double(int)>& log_lik, const McConfig& config, SeededRng& rng) {
  const int first = prev_round == 0 ? 1 : prev_round;
  const int last = next_round ? *next_round : std::numeric_limits<int>::max();
  if (last < first) throw DomainError("no admissible round between neighbouring atoms");
  const double cutoff = std::log(config.tail_threshold);
  std::vector<double> logw;
  double best = kNegInf;
  for (int r = first; r <= last && static_cast<int>(logw.size()) < config.max_round_candidates; ++r) {
    const double lp = round_log_prior(r, prev_round, prev_run, gamma_mass);
    const double value = lp == kNegInf ? kNegInf : lp + log_lik(r);
    reject_nan(value, "round indicator");
    logw.push_back(value);
    best = std::max(best, value);
    if (best > kNegInf && value < best + cutoff) break;
  }
  if (best == kNegInf) throw SamplingError("every candidate round has zero posterior weight");
  return first + static_cast<int>(sample_log_categorical(logw, rng));
}

std::uint64_t sample_count_conditional(const std::function<double(std::uint64_t)>& log_lik,
                                       const WeightSamples& samples, double others_sum, std::size_t n_docs,
                                       std::uint64_t current, const McConfig& config, SeededRng& rng) {
  const std::uint64_t cap = 10 * (current + 10);
  const double cutoff = std::log(config.tail_threshold);
  const double N = static_cast<double>(n_docs);
  std::vector<double> logw;
  double best = kNegInf;
  for (std::uint64_t z = 0; z <= cap; ++z) {
    const double ll = log_lik(z);
    double value = kNegInf;
    if (ll > kNegInf) {
      const double zd = static_cast<double>(z);
      value = ll + kernels::affine_logsumexp(others_sum + zd, samples.log_g, N, samples.g) - log_factorial(zd);
    }
    reject_nan(value, "factor count");
    logw.push_back(value);
    best = std::max(best, value);
    if (best > kNegInf && value < best + cutoff) break;
  }
  if (best == kNegInf) throw SamplingError("every candidate count has zero posterior weight");
  return sample_log_categorical(logw, rng);
}

double sample_on_grid(double current, double step, const std::function<double(double)>& log_post,
                      double threshold, int max_steps, SeededRng& rng) {
  if (!(current > 0.0) || !(step > 0.0)) throw DomainError("grid sampler needs a positive start and step");
  const double cutoff = std::log(threshold);
  std::vector<double> points{current};
  std::vector<double> logw{log_post(current)};
  reject_nan(logw[0], "grid posterior");
  double best = logw[0];
  for (int dir : {1, -1}) {
    for (int t = 1; t <= max_steps; ++t) {
      const double x = current + dir * t * step;
      if (x <= 0.0) break;
      const double value = log_post(x);
      reject_nan(value, "grid posterior");
      points.push_back(x);
      logw.push_back(value);
      best = std::max(best, value);
      if (best > kNegInf && value < best + cutoff) break;
    }
  }
  if (best == kNegInf) throw SamplingError("grid posterior vanishes at every evaluated point");
  return points[sample_log_categorical(logw, rng)];
}

Allocations thin_counts(const Corpus& corpus, const ChainState& state, SeededRng& rng) {
  const std::size_t K = state.n_atoms(), V = corpus.vocab_size();
  if (state.loadings.vocab_size() != V || state.z.n_docs() != corpus.n_docs()) {
    throw DomainError("chain state does not match the corpus");
  }
  Allocations a;
  a.n_atoms = K;
  a.vocab_size = V;
  a.cells.assign(corpus.nnz() * K, 0);
  a.word_factor.assign(V * K, 0.0);
  std::vector<double> weights(K);
  const auto entries = corpus.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const CorpusEntry& e = entries[i];
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      weights[k] = state.loadings(e.word, k) * state.z(k, e.doc);
      total += weights[k];
    }
    if (!(total > 0.0)) {
      throw SamplingError("zero rate at word " + std::to_string(e.word) + ", document " + std::to_string(e.doc));
    }
    std::span<std::uint64_t> out(a.cells.data() + i * K, K);
    sample_multinomial(e.count, weights, out, rng);
    for (std::size_t k = 0; k < K; ++k) a.word_factor[k * V + e.word] += static_cast<double>(out[k]);
  }
  return a;
}

FactorLoadings sample_loadings(const Allocations& allocations, const Hyperpriors& hyper, SeededRng& rng) {
  const std::size_t V = allocations.vocab_size, K = allocations.n_atoms;
  if (hyper.beta.size() != V) throw DomainError("beta length must equal the vocabulary size");
  FactorLoadings phi(V, K);
  std::vector<double> posterior(V);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t v = 0; v < V; ++v) posterior[v] = hyper.beta[v] + allocations.word_total(v, k);
    const std::vector<double> column = sample_dirichlet(posterior, rng);
    std::copy(column.begin(), column.end(), phi.column(k).begin());
  }
  return phi;
}

double sample_gamma_mass(const ChainState& state, const McConfig& config, SeededRng& rng) {
  if (state.rounds.empty()) throw DomainError("chain state has no atoms");
  return sample_gamma(config.gamma_prior_shape + static_cast<double>(state.n_atoms()),
                      config.gamma_prior_rate + state.rounds.back(), rng);
}

WeightPosterior::WeightPosterior(const ChainState& state, std::size_t samples, SeededRng& rng)
    : n_docs_(state.z.n_docs()) {
  const std::size_t K = state.n_atoms();
  z_sums_.resize(K);
  log_factorials_.resize(K);
  log_e_.assign(K, std::vector<double>(samples));
  t_.assign(K, std::vector<double>(samples));
  for (std::size_t k = 0; k < K; ++k) {
    double zs = 0.0, lf = 0.0;
    for (double z : state.z.row(k)) {
      zs += z;
      lf += log_factorial(z);
    }
    z_sums_[k] = zs;
    log_factorials_[k] = lf;
    for (std::size_t s = 0; s < samples; ++s) {
      log_e_[k][s] = std::log(sample_exponential(1.0, rng));
      t_[k][s] = sample_gamma(state.rounds[k], 1.0, rng);
    }
  }
}

double WeightPosterior::operator()(double alpha, double c) const {
  const double log_c = std::log(c);
  double total = 0.0;
  std::vector<double> log_g, g;
  for (std::size_t k = 0; k < z_sums_.size(); ++k) {
    const std::size_t S = log_e_[k].size();
    log_g.resize(S);
    g.resize(S);
    // E = Exp(1) / c and T = Gamma(d, 1) / alpha
    for (std::size_t s = 0; s < S; ++s) {
      log_g[s] = log_e_[k][s] - log_c - t_[k][s] / alpha;
      g[s] = std::exp(log_g[s]);
    }
    total += kernels::affine_logsumexp(z_sums_[k], log_g, static_cast<double>(n_docs_), g) -
             std::log(static_cast<double>(S)) - log_factorials_[k];
  }
  return total;
}

void sample_hypers(ChainState& state, const McConfig& config, SeededRng& rng) {
  state.gamma_mass = sample_gamma_mass(state, config, rng);
  const WeightPosterior posterior(state, config.mc_samples, rng);
  state.alpha = sample_on_grid(
      state.alpha, config.grid_step_alpha, [&](double a) { return posterior(a, state.c); }, config.tail_threshold,
      config.max_grid_steps, rng);
  state.c = sample_on_grid(
      state.c, config.grid_step_c, [&](double c) { return posterior(state.alpha, c); }, config.tail_threshold,
      config.max_grid_steps, rng);
}

ChainState initial_chain_state(const Corpus& corpus, const Hyperpriors& hyper, const GammaProcessParams& params,
                               std::size_t n_atoms, const SeededRng& rng) {
  params.validate();
  if (n_atoms < 1) throw DomainError("at least one initial atom is required");
  if (hyper.beta.size() != corpus.vocab_size()) throw DomainError("beta length must equal the vocabulary size");
  const std::size_t K = n_atoms;
  ChainState s;
  s.z = FactorCounts(K, corpus.n_docs());
  Allocations a;
  a.n_atoms = K;
  a.vocab_size = corpus.vocab_size();
  a.word_factor.assign(a.vocab_size * K, 0.0);

  SeededRng alloc_rng = rng.substream("init-allocation");
  const std::vector<double> uniform(K, 1.0);
  std::vector<std::uint64_t> out(K);
  for (const CorpusEntry& e : corpus.entries()) {
    sample_multinomial(e.count, uniform, out, alloc_rng);
    for (std::size_t k = 0; k < K; ++k) {
      s.z(k, e.doc) += static_cast<double>(out[k]);
      a.word_factor[k * a.vocab_size + e.word] += static_cast<double>(out[k]);
    }
  }
  SeededRng loading_rng = rng.substream("init-loadings");
  s.loadings = sample_loadings(a, hyper, loading_rng);
  const auto per_round = static_cast<std::size_t>(std::ceil(params.mass));
  s.rounds.resize(K);
  for (std::size_t k = 0; k < K; ++k) s.rounds[k] = 1 + static_cast<int>(k / per_round);
  s.alpha = params.alpha;
  s.c = params.c;
  s.gamma_mass = params.mass;
  return s;
}

namespace {

void sample_counts(const Corpus& train, ChainState& state, const McConfig& config, SeededRng& rng) {
  const std::size_t K = state.n_atoms(), N = train.n_docs();
  std::vector<WeightSamples> weights;
  weights.reserve(K);
  std::vector<double> z_sums(K), column_sums(K);
  for (std::size_t k = 0; k < K; ++k) {
    SeededRng wrng = rng.substream({0x77, k});
    weights.push_back(WeightSamples::draw(state.rounds[k], state.alpha, state.c, config.mc_samples, wrng));
    z_sums[k] = kernels::sum(state.z.row(k));
    column_sums[k] = kernels::sum(state.loadings.column(k));
  }
  SeededRng zrng = rng.substream("draws");
  std::vector<double> rates, base, phi_k;
  for (std::size_t n = 0; n < N; ++n) {
    const auto entries = train.doc_entries(n);
    rates.assign(entries.size(), 0.0);
    base.resize(entries.size());
    phi_k.resize(entries.size());
    for (std::size_t k = 0; k < K; ++k) {
      const double z = state.z(k, n);
      for (std::size_t i = 0; i < entries.size(); ++i) rates[i] += state.loadings(entries[i].word, k) * z;
    }
    for (std::size_t k = 0; k < K; ++k) {
      const double z_cur = state.z(k, n);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        phi_k[i] = state.loadings(entries[i].word, k);
        const double rest = rates[i] - phi_k[i] * z_cur;
        // cancellation leaves rounding noise when this factor carried the whole rate
        base[i] = rest > 1e-12 * rates[i] ? rest : 0.0;
      }
      const double col = column_sums[k];
      const auto log_lik = [&](std::uint64_t zc) {
        const double zd = static_cast<double>(zc);
        double ll = -zd * col;
        for (std::size_t i = 0; i < entries.size(); ++i) {
          const double rate = base[i] + phi_k[i] * zd;
          if (!(rate > 0.0)) return kNegInf;
          ll += static_cast<double>(entries[i].count) * std::log(rate);
        }
        return ll;
      };
      const auto current = static_cast<std::uint64_t>(z_cur);
      const std::uint64_t next =
          sample_count_conditional(log_lik, weights[k], z_sums[k] - z_cur, N, current, config, zrng);
      if (next != current) {
        const double zn = static_cast<double>(next);
        for (std::size_t i = 0; i < entries.size(); ++i) rates[i] = base[i] + phi_k[i] * zn;
        z_sums[k] += zn - z_cur;
        state.z(k, n) = zn;
      }
    }
  }
}

void sample_rounds(ChainState& state, const McConfig& config, SeededRng& rng) {
  const std::size_t K = state.n_atoms(), N = state.z.n_docs();
  for (std::size_t k = 0; k < K; ++k) {
    double z_sum = 0.0;
    for (double z : state.z.row(k)) z_sum += z;
    const int prev_round = k == 0 ? 0 : state.rounds[k - 1];
    int prev_run = 0;
    if (k > 0) {
      for (std::size_t j = 0; j < k; ++j) prev_run += state.rounds[j] == prev_round ? 1 : 0;
    }
    const std::optional<int> next = k + 1 < K ? std::optional<int>(state.rounds[k + 1]) : std::nullopt;
    SeededRng mc = rng.substream({0x64, k});
    const auto log_lik = [&](int round) {
      const WeightSamples w = WeightSamples::draw(round, state.alpha, state.c, config.mc_samples, mc);
      return mc_marginal_loglik(w, z_sum, N);
    };
    SeededRng pick = rng.substream({0x65, k});
    state.rounds[k] = sample_round(prev_round, prev_run, next, state.gamma_mass, log_lik, config, pick);
  }
}

void adapt_atoms(ChainState& state, const Hyperpriors& hyper, SeededRng& rng) {
  const auto row_empty = [&](std::size_t k) {
    for (double z : state.z.row(k)) {
      if (z != 0.0) return false;
    }
    return true;
  };
  std::size_t keep = state.n_atoms();
  while (keep > 1 && row_empty(keep - 1)) --keep;
  state.z.erase_rows_from(keep);
  state.loadings.erase_columns_from(keep);
  state.rounds.resize(keep);
  if (row_empty(keep - 1)) return;
  state.z.append_row();
  state.loadings.append_column(sample_dirichlet(hyper.beta, rng));
  state.rounds.push_back(state.rounds.back());
}

}  // namespace

void gibbs_sweep(const Corpus& train, ChainState& state, const Hyperpriors& hyper, const McConfig& config,
                 int sweep) {
  const SeededRng rng = SeededRng(config.seed).substream({0x5eedULL, static_cast<std::uint64_t>(sweep)});
  const auto stage = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const SamplingError& e) {
      throw ChainError("sweep " + std::to_string(sweep) + ", " + name + ": " + e.what());
    }
  };
  stage("thinning", [&] {
    SeededRng thin = rng.substream("thin");
    const Allocations a = thin_counts(train, state, thin);
    SeededRng load = rng.substream("loadings");
    state.loadings = sample_loadings(a, hyper, load);
  });
  stage("factor counts", [&] {
    SeededRng counts = rng.substream("counts");
    sample_counts(train, state, config, counts);
  });
  stage("round indicators", [&] {
    SeededRng rounds = rng.substream("rounds");
    sample_rounds(state, config, rounds);
  });
  stage("hyperparameters", [&] {
    SeededRng hypers = rng.substream("hypers");
    sample_hypers(state, config, hypers);
  });
  if (config.adapt_atoms) {
    SeededRng fresh = rng.substream("fresh");
    adapt_atoms(state, hyper, fresh);
  }
}

ChainResult run_chain(const Corpus& train, const Corpus& test, ChainState init, const Hyperpriors& hyper,
                      const McConfig& config) {
  config.validate();
  hyper.validate();
  if (train.empty()) throw DomainError("training corpus is empty");
  if (test.vocab_size() != train.vocab_size() || test.n_docs() != train.n_docs()) {
    throw DomainError("train and test corpora must share dimensions");
  }
  init.validate();
  if (init.loadings.vocab_size() != train.vocab_size() || init.z.n_docs() != train.n_docs()) {
    throw DomainError("initial chain state does not match the corpus");
  }

  const auto start = std::chrono::steady_clock::now();
  ChainResult result;
  result.state = std::move(init);
  const bool have_test = test.total_count() > 0;
  HeldoutAccumulator heldout(test);

  const int total = config.burn_in + config.n_iters;
  for (int sweep = 1; sweep <= total; ++sweep) {
    gibbs_sweep(train, result.state, hyper, config, sweep);
    const ChainState& s = result.state;
    result.hypers.push_back({sweep, s.n_atoms(), s.alpha, s.c, s.gamma_mass});
    if (sweep <= config.burn_in) continue;

    FitTrace::Row row;
    row.iteration = sweep - config.burn_in;
    if (have_test) {
      heldout.add(s.loadings, s.z);
      row.heldout = heldout.value();
    } else {
      row.heldout = std::numeric_limits<double>::quiet_NaN();
    }
    row.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.rows.push_back(row);
    if (config.keep_samples) result.samples.push_back(s);
  }
  return result;
}

}  // namespace gammaproc
