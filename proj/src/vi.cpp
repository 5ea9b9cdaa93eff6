#include "gammaproc/vi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "gammaproc/error.hpp"
#include "gammaproc/kernels.hpp"
#include "gammaproc/numeric/special.hpp"

namespace gammaproc {

namespace {

constexpr double kCountFloor = 1e-8;
constexpr double kLoadingFloor = 1e-6;
constexpr double kTFloor = 1e-6;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require_positive(const std::vector<double>& xs, const char* name) {
  for (double x : xs) {
    if (!positive_finite(x)) throw DomainError(std::string("variational parameter ") + name + " must be positive");
  }
}

// Entropy of Gamma(shape, rate).
double gamma_entropy(double shape, double rate) {
  return shape - std::log(rate) + log_gamma(shape) + (1.0 - shape) * digamma(shape);
}

// E_q log Gamma(x | a0, b0) for q = Gamma(shape, rate).
double gamma_cross(double a0, double b0, double shape, double rate) {
  return a0 * std::log(b0) - log_gamma(a0) + (a0 - 1.0) * (digamma(shape) - std::log(rate)) - b0 * shape / rate;
}

double mean_exp_neg(double u, double v) { return std::exp(u * (std::log(v) - std::log1p(v))); }

// Cumulative round probabilities F_k(r) = sum_{r' <= r} varphi_k(r'), r = 0..R.
std::vector<double> round_cdfs(const VariationalState& s) {
  const int R = s.max_rounds;
  std::vector<double> cdf(s.n_atoms * (R + 1), 0.0);
  for (std::size_t k = 0; k < s.n_atoms; ++k) {
    double acc = 0.0;
    for (int r = 1; r <= R; ++r) {
      acc += s.round_prob(k, r);
      cdf[k * (R + 1) + r] = acc;
    }
  }
  return cdf;
}

void check_data(const VariationalState& s, const DataAggregates& data) {
  if (data.n_docs != s.n_docs) throw DomainError("data aggregates do not match the variational state");
}

void check_corpus(const VariationalState& s, const Corpus& corpus) {
  if (corpus.n_docs() != s.n_docs || corpus.vocab_size() != s.vocab_size) {
    throw DomainError("corpus dimensions do not match the variational state");
  }
}

// Column-normalized E[Phi], column-major.
std::vector<double> mean_loadings(const VariationalState& s) {
  std::vector<double> phi(s.b);
  for (std::size_t k = 0; k < s.n_atoms; ++k) {
    std::span<double> col(phi.data() + k * s.vocab_size, s.vocab_size);
    const double total = kernels::sum(col);
    for (double& x : col) x /= total;
  }
  return phi;
}

}  // namespace

void ViConfig::validate() const {
  if (truncation_atoms < 1) throw DomainError("truncation_atoms must be at least 1");
  if (max_rounds < 1) throw DomainError("max_rounds must be at least 1");
  if (!positive_finite(learning_rate)) throw DomainError("learning_rate must be positive");
  if (grad_steps < 1) throw DomainError("grad_steps must be at least 1");
  if (!std::isfinite(zeta)) throw DomainError("zeta must be finite");
  if (max_iters < 0) throw DomainError("max_iters must be nonnegative");
  if (!positive_finite(convergence_tol)) throw DomainError("convergence_tol must be positive");
}

void VariationalState::validate() const {
  const std::size_t K = n_atoms;
  if (K == 0 || max_rounds < 1) throw DomainError("variational state is empty");
  if (xi.size() != K || eps.size() != K || u.size() != K || v.size() != K ||
      varphi.size() != K * static_cast<std::size_t>(max_rounds) || lambda.size() != K * n_docs ||
      b.size() != K * vocab_size) {
    throw DomainError("variational state has inconsistent sizes");
  }
  require_positive(xi, "xi");
  require_positive(eps, "eps");
  require_positive(u, "u");
  require_positive(v, "v");
  require_positive(b, "b");
  for (double x : {kappa1, kappa2, tau1, tau2, rho1, rho2}) {
    if (!positive_finite(x)) throw DomainError("global variational parameter must be positive");
  }
  for (double x : lambda) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError("lambda must be nonnegative");
  }
  for (std::size_t k = 0; k < K; ++k) {
    double total = 0.0;
    for (int r = 1; r <= max_rounds; ++r) {
      const double p = round_prob(k, r);
      if (!std::isfinite(p) || p < 0.0) throw DomainError("varphi must be a probability vector");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("varphi must sum to one");
  }
}

FactorLoadings VariationalState::expected_loadings() const {
  return FactorLoadings(vocab_size, n_atoms, mean_loadings(*this));
}

FactorCounts VariationalState::expected_counts() const { return FactorCounts(n_atoms, n_docs, lambda); }

MomentBundle q_moments(const VariationalState& s, std::size_t k) {
  MomentBundle m;
  m.mean_E = s.xi[k] / s.eps[k];
  m.mean_log_E = digamma(s.xi[k]) - std::log(s.eps[k]);
  m.mean_T = s.u[k] / s.v[k];
  m.mean_log_T = digamma(s.u[k]) - std::log(s.v[k]);
  m.mean_exp_neg_T = mean_exp_neg(s.u[k], s.v[k]);
  m.mean_alpha = s.kappa1 / s.kappa2;
  m.mean_log_alpha = digamma(s.kappa1) - std::log(s.kappa2);
  m.mean_c = s.rho1 / s.rho2;
  m.mean_log_c = digamma(s.rho1) - std::log(s.rho2);
  m.mean_mass = s.tau1 / s.tau2;
  m.mean_log_mass = digamma(s.tau1) - std::log(s.tau2);
  m.sum_lambda = kernels::sum(std::span<const double>(s.lambda.data() + k * s.n_docs, s.n_docs));
  for (int r = 1; r <= s.max_rounds; ++r) m.mean_round_minus_one += (r - 1) * s.round_prob(k, r);
  return m;
}

DataAggregates DataAggregates::from(const Corpus& corpus) {
  DataAggregates d;
  d.n_docs = corpus.n_docs();
  const auto lengths = corpus.doc_lengths();
  const auto totals = corpus.word_totals();
  d.doc_lengths.assign(lengths.begin(), lengths.end());
  d.word_totals.assign(totals.begin(), totals.end());
  return d;
}

VariationalState initialize_state(const Corpus& corpus, const Hyperpriors& hyper, const ViConfig& config) {
  config.validate();
  hyper.validate();
  if (hyper.beta.size() != corpus.vocab_size()) throw DomainError("beta length must equal the vocabulary size");
  VariationalState s;
  const std::size_t K = config.truncation_atoms;
  s.n_atoms = K;
  s.max_rounds = config.max_rounds;
  s.n_docs = corpus.n_docs();
  s.vocab_size = corpus.vocab_size();
  s.xi.assign(K, 1.0);
  s.eps.assign(K, 1.0);
  s.u.assign(K, 1.0);
  s.v.assign(K, 1.0);
  s.varphi.assign(K * config.max_rounds, 1.0 / config.max_rounds);
  s.kappa1 = hyper.a1;
  s.kappa2 = hyper.a2;
  s.tau1 = hyper.b1;
  s.tau2 = hyper.b2;
  s.rho1 = hyper.c1;
  s.rho2 = hyper.c2;

  const auto lengths = corpus.doc_lengths();
  s.lambda.resize(K * s.n_docs);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t n = 0; n < s.n_docs; ++n) s.lambda_at(k, n) = static_cast<double>(lengths[n]) / K;
  }

  SeededRng jitter = SeededRng(config.seed).substream("loadings");
  s.b.resize(K * s.vocab_size);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t v = 0; v < s.vocab_size; ++v) s.b_at(v, k) = hyper.beta[v] + 0.1 * jitter.uniform();
  }
  return s;
}

void update_E(VariationalState& s, const DataAggregates& data) {
  check_data(s, data);
  const double mean_c = s.rho1 / s.rho2;
  const double N = static_cast<double>(data.n_docs);
  for (std::size_t k = 0; k < s.n_atoms; ++k) {
    s.xi[k] = kernels::sum(std::span<const double>(s.lambda.data() + k * s.n_docs, s.n_docs)) + 1.0;
    s.eps[k] = mean_c + N * mean_exp_neg(s.u[k], s.v[k]);
  }
}

void update_global(VariationalState& s, const Hyperpriors& hyper) {
  const std::size_t K = s.n_atoms;
  const int R = s.max_rounds;
  double round_sum = 0.0, t_sum = 0.0, e_sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (int r = 1; r <= R; ++r) round_sum += r * s.round_prob(k, r);
    t_sum += s.u[k] / s.v[k];
    e_sum += s.xi[k] / s.eps[k];
  }
  s.kappa1 = round_sum + hyper.a1;
  s.kappa2 = t_sum + hyper.a2;
  s.rho1 = hyper.c1 + static_cast<double>(K);
  s.rho2 = e_sum + hyper.c2;
  s.tau1 = hyper.b1 + static_cast<double>(K);

  const auto cdf = round_cdfs(s);
  double occupied = 0.0;
  for (int r = 1; r <= R; ++r) {
    double none = 1.0;
    for (std::size_t k = 0; k < K; ++k) none *= cdf[k * (R + 1) + (r - 1)];
    occupied += 1.0 - none;
  }
  s.tau2 = occupied + hyper.b2;
}

void update_rounds(VariationalState& s, const ViConfig& config) {
  const std::size_t K = s.n_atoms;
  const int R = s.max_rounds;
  const double mean_log_alpha = digamma(s.kappa1) - std::log(s.kappa2);
  const double mean_mass = s.tau1 / s.tau2;
  const auto cdf = round_cdfs(s);

  std::vector<double> occupancy(R + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (int r = 1; r <= R; ++r) occupancy[r] += s.round_prob(k, r);
  }

  // Every atom reads the previous varphi; the write-back happens afterwards.
  std::vector<double> next(s.varphi.size());
  std::vector<double> logw(R + 1);
  for (std::size_t k = 0; k < K; ++k) {
    const double mean_log_T = digamma(s.u[k]) - std::log(s.v[k]);
    double tail = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 1; r <= R; ++r) {
      if (r >= 2) {
        double others_before = 1.0;
        for (std::size_t j = 0; j < K; ++j) {
          if (j != k) others_before *= cdf[j * (R + 1) + (r - 1)];
        }
        tail += others_before;
      }
      logw[r] = r * mean_log_alpha - log_gamma(r) + (r - 1) * mean_log_T -
                config.zeta * (occupancy[r] - s.round_prob(k, r)) - mean_mass * tail;
      best = std::max(best, logw[r]);
    }
    double total = 0.0;
    for (int r = 1; r <= R; ++r) {
      logw[r] = std::exp(logw[r] - best);
      total += logw[r];
    }
    for (int r = 1; r <= R; ++r) next[k * R + (r - 1)] = logw[r] / total;
  }
  s.varphi = std::move(next);
}

TGradient grad_T(const VariationalState& s, const DataAggregates& data, std::size_t k, TEntropy form) {
  check_data(s, data);
  const double u = s.u[k], v = s.v[k];
  const double N = static_cast<double>(data.n_docs);
  double nu1 = 0.0;
  for (int r = 1; r <= s.max_rounds; ++r) nu1 += (r - 1) * s.round_prob(k, r);
  const double mean_alpha = s.kappa1 / s.kappa2;
  const double mean_E = s.xi[k] / s.eps[k];
  const double sum_lambda = kernels::sum(std::span<const double>(s.lambda.data() + k * s.n_docs, s.n_docs));
  const double ratio_log = std::log(v) - std::log1p(v);
  const double e_neg = std::exp(u * ratio_log);
  const double tg = trigamma(u);
  const double entropy_constant = form == TEntropy::as_printed ? -1.0 : 1.0;

  TGradient g;
  g.du = nu1 * tg - mean_alpha / v - N * mean_E * e_neg * ratio_log - sum_lambda / v - (u - 1.0) * tg +
         entropy_constant;
  // v^(u-1) / (v+1)^(u+1) = (v/(v+1))^u / (v (v+1))
  g.dv = -nu1 / v + mean_alpha * u / (v * v) - N * mean_E * u * e_neg / (v * (v + 1.0)) +
         sum_lambda * u / (v * v) - 1.0 / v;
  return g;
}

void ascend_T(VariationalState& s, const DataAggregates& data, const ViConfig& config) {
  const double eta = config.learning_rate;
  for (int step = 0; step < config.grad_steps; ++step) {
    for (std::size_t k = 0; k < s.n_atoms; ++k) {
      const TGradient g = grad_T(s, data, k, config.t_entropy);
      s.u[k] = std::max(kTFloor, s.u[k] + eta * g.du);
      s.v[k] = std::max(kTFloor, s.v[k] + eta * g.dv);
      if (!std::isfinite(s.u[k]) || !std::isfinite(s.v[k])) {
        throw NumericalError("q(T_" + std::to_string(k) + ") parameters diverged");
      }
    }
  }
}

void update_loadings(VariationalState& s, const DataAggregates& data, const Hyperpriors& hyper) {
  check_data(s, data);
  if (data.word_totals.size() != s.vocab_size || hyper.beta.size() != s.vocab_size) {
    throw DomainError("vocabulary size mismatch in loading update");
  }
  for (std::size_t k = 0; k < s.n_atoms; ++k) {
    const double sum_lambda = kernels::sum(std::span<const double>(s.lambda.data() + k * s.n_docs, s.n_docs));
    for (std::size_t v = 0; v < s.vocab_size; ++v) {
      s.b_at(v, k) = std::max(kLoadingFloor, -sum_lambda + data.word_totals[v] + hyper.beta[v]);
    }
  }
}

void update_counts(VariationalState& s, const Corpus& corpus, const ViConfig& config) {
  check_corpus(s, corpus);
  const std::size_t K = s.n_atoms, N = s.n_docs;
  std::vector<double> mean_log_E(K), mean_T(K);
  for (std::size_t k = 0; k < K; ++k) {
    mean_log_E[k] = digamma(s.xi[k]) - std::log(s.eps[k]);
    mean_T[k] = s.u[k] / s.v[k];
  }

  if (config.count_update == CountUpdate::literal) {
    const auto lengths = corpus.doc_lengths();
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t n = 0; n < N; ++n) {
        s.lambda_at(k, n) =
            std::max(kCountFloor, -1.0 - static_cast<double>(lengths[n]) + mean_log_E[k] + mean_T[k]);
      }
    }
    return;
  }

  const std::vector<double> phi = mean_loadings(s);
  const std::vector<double> previous = s.lambda;
  std::vector<double> weights(K);
  for (std::size_t n = 0; n < N; ++n) {
    std::vector<double> allocated(K, 0.0);
    for (const CorpusEntry& e : corpus.doc_entries(n)) {
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        weights[k] = phi[k * s.vocab_size + e.word] * previous[k * N + n];
        total += weights[k];
      }
      if (total <= 0.0) continue;
      const double scale = static_cast<double>(e.count) / total;
      for (std::size_t k = 0; k < K; ++k) allocated[k] += weights[k] * scale;
    }
    for (std::size_t k = 0; k < K; ++k) {
      s.lambda_at(k, n) = std::max(kCountFloor, std::exp(mean_log_E[k] - mean_T[k]) + allocated[k]);
    }
  }
}

double ElboTerms::total() const {
  return prior_alpha + prior_mass + prior_c + rounds + weights_E + weights_T + counts + loadings + data +
         entropy_E + entropy_T + entropy_rounds + entropy_alpha + entropy_mass + entropy_c;
}

std::string ElboTerms::first_non_finite() const {
  const std::pair<const char*, double> named[] = {
      {"prior_alpha", prior_alpha}, {"prior_mass", prior_mass},       {"prior_c", prior_c},
      {"rounds", rounds},           {"weights_E", weights_E},         {"weights_T", weights_T},
      {"counts", counts},           {"loadings", loadings},           {"data", data},
      {"entropy_E", entropy_E},     {"entropy_T", entropy_T},         {"entropy_rounds", entropy_rounds},
      {"entropy_alpha", entropy_alpha}, {"entropy_mass", entropy_mass}, {"entropy_c", entropy_c},
  };
  for (const auto& [name, value] : named) {
    if (!std::isfinite(value)) return name;
  }
  return {};
}

ElboTerms elbo_terms(const VariationalState& s, const Corpus& corpus, const Hyperpriors& hyper,
                     const ViConfig& config) {
  check_corpus(s, corpus);
  if (hyper.beta.size() != s.vocab_size) throw DomainError("beta length must equal the vocabulary size");
  const std::size_t K = s.n_atoms, N = s.n_docs, V = s.vocab_size;
  const int R = s.max_rounds;
  ElboTerms t;

  t.prior_alpha = gamma_cross(hyper.a1, hyper.a2, s.kappa1, s.kappa2);
  t.prior_mass = gamma_cross(hyper.b1, hyper.b2, s.tau1, s.tau2);
  t.prior_c = gamma_cross(hyper.c1, hyper.c2, s.rho1, s.rho2);
  t.entropy_alpha = gamma_entropy(s.kappa1, s.kappa2);
  t.entropy_mass = gamma_entropy(s.tau1, s.tau2);
  t.entropy_c = gamma_entropy(s.rho1, s.rho2);

  const double mean_alpha = s.kappa1 / s.kappa2;
  const double mean_log_alpha = digamma(s.kappa1) - std::log(s.kappa2);
  const double mean_c = s.rho1 / s.rho2;
  const double mean_log_c = digamma(s.rho1) - std::log(s.rho2);
  const double mean_mass = s.tau1 / s.tau2;
  const double mean_log_mass = digamma(s.tau1) - std::log(s.tau2);

  // Round occupancy: K E[log mass] - E sum_r log(count_r!) - E[mass] sum_r P(some atom at round >= r),
  // with E log(count_r!) replaced by zeta * sum_{i<j} varphi_i(r) varphi_j(r).
  const auto cdf = round_cdfs(s);
  double pair_sum = 0.0, occupied = 0.0;
  for (int r = 1; r <= R; ++r) {
    double total = 0.0, squares = 0.0, none = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double p = s.round_prob(k, r);
      total += p;
      squares += p * p;
      none *= cdf[k * (R + 1) + (r - 1)];
    }
    pair_sum += 0.5 * (total * total - squares);
    occupied += 1.0 - none;
  }
  t.rounds = static_cast<double>(K) * mean_log_mass - config.zeta * pair_sum - mean_mass * occupied;

  for (std::size_t k = 0; k < K; ++k) {
    const MomentBundle m = q_moments(s, k);
    t.weights_E += mean_log_c - mean_c * m.mean_E;
    t.entropy_E += gamma_entropy(s.xi[k], s.eps[k]);

    double nu0 = 0.0, log_norm = 0.0, round_entropy = 0.0;
    for (int r = 1; r <= R; ++r) {
      const double p = s.round_prob(k, r);
      nu0 += r * p;
      log_norm += p * log_gamma(r);
      if (p > 0.0) round_entropy -= p * std::log(p);
    }
    t.weights_T += nu0 * mean_log_alpha - log_norm + m.mean_round_minus_one * m.mean_log_T - mean_alpha * m.mean_T;
    t.entropy_rounds += round_entropy;
    const double h_T = gamma_entropy(s.u[k], s.v[k]);
    t.entropy_T += config.t_entropy == TEntropy::exact ? h_T : h_T - 2.0 * s.u[k];

    // E log Poisson(z | E e^{-T}) + H[Poisson(lambda)]; the log z! parts cancel.
    double count_term = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double lam = s.lambda_at(k, n);
      count_term += lam * (m.mean_log_E - m.mean_T) - m.mean_E * m.mean_exp_neg_T + lam;
      if (lam > 0.0) count_term -= lam * std::log(lam);
    }
    t.counts += count_term;

    // E log Dir(phi_k | beta) + H[Dir(b_k)].
    double b_total = 0.0, beta_total = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      b_total += s.b_at(v, k);
      beta_total += hyper.beta[v];
    }
    const double psi_total = digamma(b_total);
    double dir = log_gamma(beta_total) - log_gamma(b_total);
    for (std::size_t v = 0; v < V; ++v) {
      const double bv = s.b_at(v, k);
      dir += -log_gamma(hyper.beta[v]) + log_gamma(bv) + (hyper.beta[v] - bv) * (digamma(bv) - psi_total);
    }
    t.loadings += dir;
  }

  // Poisson likelihood of the counts at the rates E[Phi] E[Z]; each E[Phi]
  // column sums to one, so the total rate is sum(lambda).
  const std::vector<double> phi = mean_loadings(s);
  std::vector<double> phi_row(K);
  double data_term = -kernels::sum(s.lambda);
  for (std::size_t n = 0; n < N; ++n) {
    for (const CorpusEntry& e : corpus.doc_entries(n)) {
      double rate = 0.0;
      for (std::size_t k = 0; k < K; ++k) rate += phi[k * V + e.word] * s.lambda[k * N + n];
      const double d = static_cast<double>(e.count);
      data_term += d * std::log(rate) - log_gamma(d + 1.0);
    }
  }
  t.data = data_term;
  return t;
}

double elbo(const VariationalState& s, const Corpus& corpus, const Hyperpriors& hyper, const ViConfig& config) {
  const ElboTerms t = elbo_terms(s, corpus, hyper, config);
  const std::string bad = t.first_non_finite();
  if (!bad.empty()) throw NumericalError("ELBO term '" + bad + "' is not finite");
  const double total = t.total();
  if (!std::isfinite(total)) throw NumericalError("ELBO total is not finite");
  return total;
}

FitResult fit(const Corpus& train, const Corpus& test, const Hyperpriors& hyper, const ViConfig& config) {
  if (train.empty()) throw DomainError("training corpus is empty");
  if (test.vocab_size() != train.vocab_size() || test.n_docs() != train.n_docs()) {
    throw DomainError("train and test corpora must share dimensions");
  }
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const bool have_test = test.total_count() > 0;
  const DataAggregates data = DataAggregates::from(train);

  FitResult result{initialize_state(train, hyper, config), {}, false};
  VariationalState& s = result.state;

  const auto evaluate = [&](int iteration) {
    FitTrace::Row row;
    row.iteration = iteration;
    try {
      row.elbo = elbo(s, train, hyper, config);
    } catch (const NumericalError& e) {
      throw FitError(std::string("divergent state: ") + e.what(), iteration);
    }
    row.heldout = have_test
                      ? heldout_per_word_loglik(test, s.expected_loadings(), s.expected_counts())
                      : std::numeric_limits<double>::quiet_NaN();
    row.elapsed_seconds = elapsed();
    result.trace.rows.push_back(row);
  };

  evaluate(0);
  int streak = 0;
  for (int it = 1; it <= config.max_iters; ++it) {
    try {
      update_counts(s, train, config);
      update_loadings(s, data, hyper);
      update_E(s, data);
      ascend_T(s, data, config);
      update_rounds(s, config);
      update_global(s, hyper);
    } catch (const NumericalError& e) {
      throw FitError(std::string("divergent state: ") + e.what(), it);
    } catch (const DomainError& e) {
      throw FitError(std::string("divergent state: ") + e.what(), it);
    }
    evaluate(it);

    const auto& prev = result.trace.rows[result.trace.rows.size() - 2];
    const auto& cur = result.trace.rows.back();
    const double change = have_test ? std::abs(cur.heldout - prev.heldout)
                                    : std::abs(*cur.elbo - *prev.elbo) / std::max(1.0, std::abs(*cur.elbo));
    streak = change < config.convergence_tol ? streak + 1 : 0;
    if (streak >= 3) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace gammaproc
