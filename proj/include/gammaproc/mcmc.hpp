#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gammaproc/corpus.hpp"
#include "gammaproc/crm.hpp"
#include "gammaproc/model.hpp"
#include "gammaproc/numeric/rng.hpp"
#include "gammaproc/vi.hpp"

namespace gammaproc {

struct ChainState {
  FactorCounts z;           // K x N, integer-valued
  FactorLoadings loadings;  // V x K
  std::vector<int> rounds;  // d_k, nondecreasing
  double alpha = 1.0;
  double c = 1.0;
  double gamma_mass = 1.0;

  std::size_t n_atoms() const noexcept { return rounds.size(); }
  /// Shapes agree, counts are nonnegative integers, rounds are >= 1 and
  /// sorted, hyperparameters positive. Throws DomainError otherwise.
  void validate() const;
};

struct McConfig {
  std::size_t mc_samples = 1000;
  double grid_step_alpha = 0.05;
  double grid_step_c = 0.05;
  double tail_threshold = 1e-2;
  int burn_in = 300;
  int n_iters = 30;
  std::uint64_t seed = 1;
  double gamma_prior_shape = 1.0;
  double gamma_prior_rate = 1.0;
  int max_grid_steps = 400;         // per direction
  int max_round_candidates = 200;
  bool adapt_atoms = true;
  bool keep_samples = false;

  void validate() const;
};

/// S draws of an atom weight g = E exp(-T), E ~ Exp(c), T ~ Gamma(round, alpha),
/// held as (log g, g) pairs.
struct WeightSamples {
  std::vector<double> log_g;
  std::vector<double> g;

  std::size_t size() const noexcept { return g.size(); }
  static WeightSamples draw(int round, double alpha, double c, std::size_t count, SeededRng& rng);
  /// Every sample equal to `weight`.
  static WeightSamples point_mass(double weight, std::size_t count = 1);
};

/// log (1/S) sum_s exp(z_sum log g_s - n_docs g_s) - log_factorial_sum: the
/// MC-marginal column likelihood written in its sufficient statistics.
double mc_marginal_loglik(const WeightSamples& samples, double z_sum, std::size_t n_docs,
                          double log_factorial_sum = 0.0);

/// log of (1/S) sum_s prod_n Poisson(z_n | g_s), with fresh weight draws.
double mc_marginal_loglik(std::span<const double> z_col, int round, double alpha, double c, std::size_t samples,
                          SeededRng& rng);

/// log p(d_k = round | previous atom in round prev_round, which held the
/// prev_run-th atom of that round). prev_round == 0 marks the first atom,
/// whose round is geometric: (1 - Pois(0)) Pois(0)^(round - 1).
double round_log_prior(int round, int prev_round, int prev_run, double gamma_mass);

/// Draw a round from the product of `log_lik(round)` and the round prior over
/// candidates prev_round, prev_round + 1, ... (1, 2, ... for the first atom),
/// stopping once the product falls below tail_threshold of its running
/// maximum. Candidates never exceed `next_round` when given.
int sample_round(int prev_round, int prev_run, std::optional<int> next_round, double gamma_mass,
                 const std::function<double(int)>& log_lik, const McConfig& config, SeededRng& rng);

/// Draw z from likelihood(z) times the MC-marginal prior of the count given the
/// rest of its column (others_sum over n_docs - 1 other documents plus this
/// one). Candidates z = 0, 1, ... until the tail rule, capped at
/// 10 (current + 10).
std::uint64_t sample_count_conditional(const std::function<double(std::uint64_t)>& log_lik,
                                       const WeightSamples& samples, double others_sum, std::size_t n_docs,
                                       std::uint64_t current, const McConfig& config, SeededRng& rng);

/// Grid draw on current + t * step, expanding t in both directions until
/// log_post falls below log(threshold) relative to the running maximum or the
/// grid would leave (0, inf).
double sample_on_grid(double current, double step, const std::function<double(double)>& log_post,
                      double threshold, int max_steps, SeededRng& rng);

/// Per-cell multinomial split of the corpus counts over factors.
struct Allocations {
  std::size_t n_atoms = 0;
  std::size_t vocab_size = 0;
  std::vector<std::uint64_t> cells;  // nnz x K, entry-major, aligned with corpus.entries()
  std::vector<double> word_factor;   // V x K column-major: d_vk = sum_n d_vkn

  std::uint64_t cell(std::size_t entry, std::size_t k) const { return cells[entry * n_atoms + k]; }
  double word_total(std::size_t v, std::size_t k) const { return word_factor[k * vocab_size + v]; }
};

/// Throws SamplingError when a nonzero cell has zero rate.
Allocations thin_counts(const Corpus& corpus, const ChainState& state, SeededRng& rng);

/// Each column from Dirichlet(beta + d_.k).
FactorLoadings sample_loadings(const Allocations& allocations, const Hyperpriors& hyper, SeededRng& rng);

/// Gamma(a + K, b + d_K).
double sample_gamma_mass(const ChainState& state, const McConfig& config, SeededRng& rng);

/// sum_k MC-marginal log-likelihood of the factor rows as a function of alpha
/// and c, with shared random numbers so that each grid evaluation sees the same
/// underlying draws.
class WeightPosterior {
 public:
  WeightPosterior(const ChainState& state, std::size_t samples, SeededRng& rng);
  double operator()(double alpha, double c) const;

 private:
  std::size_t n_docs_;
  std::vector<double> z_sums_;
  std::vector<double> log_factorials_;
  std::vector<std::vector<double>> log_e_;  // log of Exp(1) draws, per atom
  std::vector<std::vector<double>> t_;      // Gamma(d_k, 1) draws, per atom
};

/// Updates gamma_mass, then alpha, then c.
void sample_hypers(ChainState& state, const McConfig& config, SeededRng& rng);

/// Tokens spread uniformly at random over n_atoms factors; loadings from
/// their Dirichlet posterior; rounds 1 + k / ceil(mass).
ChainState initial_chain_state(const Corpus& corpus, const Hyperpriors& hyper, const GammaProcessParams& params,
                               std::size_t n_atoms, const SeededRng& rng);

struct HyperTraceRow {
  int sweep = 0;
  std::size_t n_atoms = 0;
  double alpha = 0.0, c = 0.0, gamma_mass = 0.0;
};

struct ChainResult {
  ChainState state;
  std::vector<ChainState> samples;  // post-burn-in states when keep_samples
  FitTrace trace;                   // one row per post-burn-in sweep
  std::vector<HyperTraceRow> hypers;  // one row per sweep, burn-in included
};

/// One full sweep: thinning, loadings, counts, rounds, hyperparameters, then
/// atom adaptation.
void gibbs_sweep(const Corpus& train, ChainState& state, const Hyperpriors& hyper, const McConfig& config,
                 int sweep);

/// Held-out values are the metric of the running mean of Phi Z over the
/// post-burn-in sweeps so far.
ChainResult run_chain(const Corpus& train, const Corpus& test, ChainState init, const Hyperpriors& hyper,
                      const McConfig& config);

}  // namespace gammaproc
