#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gammaproc/corpus.hpp"
#include "gammaproc/model.hpp"

namespace gammaproc {

/// How q(z_nk) = Poisson(lambda_nk) is refreshed each iteration.
enum class CountUpdate {
  /// lambda_nk = -1 - sum_v d_vn + E[log E_k] + E[T_k], floored at 1e-8.
  literal,
  /// lambda_nk = exp(E[log E_k] - E[T_k]) + sum_v d_vn * omega_vnk, where
  /// omega allocates each token over factors in proportion to
  /// E[phi_vk] * lambda_nk (previous values).
  multiplicative,
};

/// Which entropy term of q(T_k) enters the bound. `as_printed` is the form
/// whose partial in u_k ends in the constant -1 of the standard q(T_k) gradient;
/// `exact` is the Gamma entropy u - log v + lnGamma(u) + (1 - u) psi(u).
enum class TEntropy { as_printed, exact };

struct ViConfig {
  std::size_t truncation_atoms = 30;
  int max_rounds = 20;
  double learning_rate = 1e-4;
  int grad_steps = 5;
  double zeta = 1.0;
  int max_iters = 100;
  double convergence_tol = 1e-3;
  std::uint64_t seed = 1;
  CountUpdate count_update = CountUpdate::literal;
  TEntropy t_entropy = TEntropy::as_printed;

  void validate() const;
};

/// Parameters of the factorized variational distribution.
///   q(E_k) = Gamma(xi_k, eps_k), q(T_k) = Gamma(u_k, v_k), q(d_k) = Mult(varphi_k)
///   q(alpha) = Gamma(kappa1, kappa2), q(mass) = Gamma(tau1, tau2), q(c) = Gamma(rho1, rho2)
///   q(z_nk) = Poisson(lambda_nk), q(phi_k) = Dirichlet(b_.k)
struct VariationalState {
  std::size_t n_atoms = 0;
  int max_rounds = 0;
  std::size_t n_docs = 0;
  std::size_t vocab_size = 0;

  std::vector<double> xi, eps;  // K
  std::vector<double> u, v;     // K
  std::vector<double> varphi;   // K x R, row-major; varphi[k * R + (r - 1)]
  double kappa1 = 1.0, kappa2 = 1.0;
  double tau1 = 1.0, tau2 = 1.0;
  double rho1 = 1.0, rho2 = 1.0;
  std::vector<double> lambda;  // K x N, row-major
  std::vector<double> b;       // V x K, column-major

  double round_prob(std::size_t k, int r) const { return varphi[k * max_rounds + (r - 1)]; }
  double& round_prob(std::size_t k, int r) { return varphi[k * max_rounds + (r - 1)]; }
  double& lambda_at(std::size_t k, std::size_t n) { return lambda[k * n_docs + n]; }
  double lambda_at(std::size_t k, std::size_t n) const { return lambda[k * n_docs + n]; }
  double& b_at(std::size_t v, std::size_t k) { return b[k * vocab_size + v]; }
  double b_at(std::size_t v, std::size_t k) const { return b[k * vocab_size + v]; }

  /// Positivity, finiteness, and varphi normalization (within 1e-9).
  void validate() const;

  /// E[Phi] = b / column sums.
  FactorLoadings expected_loadings() const;
  /// E[Z] = lambda.
  FactorCounts expected_counts() const;
};

/// Expectations under Q used by the updates for atom k.
struct MomentBundle {
  double mean_E = 0.0;        // E[E_k]
  double mean_log_E = 0.0;    // E[log E_k]
  double mean_T = 0.0;        // E[T_k]
  double mean_log_T = 0.0;    // E[log T_k]
  double mean_exp_neg_T = 0.0;  // E[exp(-T_k)]
  double mean_alpha = 0.0;
  double mean_log_alpha = 0.0;
  double mean_c = 0.0;
  double mean_log_c = 0.0;
  double mean_mass = 0.0;
  double mean_log_mass = 0.0;
  double sum_lambda = 0.0;    // sum_n E[z_nk]
  double mean_round_minus_one = 0.0;  // sum_r (r - 1) varphi_k(r)
};

MomentBundle q_moments(const VariationalState& state, std::size_t k);

/// Corpus aggregates every update needs.
struct DataAggregates {
  std::size_t n_docs = 0;
  std::vector<double> doc_lengths;  // sum_v d_vn
  std::vector<double> word_totals;  // sum_n d_vn

  static DataAggregates from(const Corpus& corpus);
};

VariationalState initialize_state(const Corpus& corpus, const Hyperpriors& hyper, const ViConfig& config);

void update_E(VariationalState& state, const DataAggregates& data);
void update_global(VariationalState& state, const Hyperpriors& hyper);
void update_rounds(VariationalState& state, const ViConfig& config);

struct TGradient {
  double du = 0.0;
  double dv = 0.0;
};

TGradient grad_T(const VariationalState& state, const DataAggregates& data, std::size_t k,
                 TEntropy form = TEntropy::as_printed);

/// `grad_steps` simultaneous gradient steps on every (u_k, v_k), each
/// coordinate floored at 1e-6 after every step.
void ascend_T(VariationalState& state, const DataAggregates& data, const ViConfig& config);

/// b_vk = -sum_n lambda_nk + sum_n d_vn + beta_v, floored at 1e-6.
void update_loadings(VariationalState& state, const DataAggregates& data, const Hyperpriors& hyper);

void update_counts(VariationalState& state, const Corpus& corpus, const ViConfig& config);

/// The bound split by source so a non-finite term can be named.
struct ElboTerms {
  double prior_alpha = 0.0, prior_mass = 0.0, prior_c = 0.0;
  double rounds = 0.0;       // E log P(d | mass), interaction terms approximated
  double weights_E = 0.0;    // sum_k E log P(E_k | c)
  double weights_T = 0.0;    // sum_k E log P(T_k | d_k, alpha)
  double counts = 0.0;       // sum_nk E log P(z_nk | E_k, T_k) + H[q(z_nk)], log z! cancelled
  double loadings = 0.0;     // sum_k E log Dir(phi_k | beta) + H[q(phi_k)]
  double data = 0.0;         // Poisson likelihood at the expected rates
  double entropy_E = 0.0, entropy_T = 0.0, entropy_rounds = 0.0;
  double entropy_alpha = 0.0, entropy_mass = 0.0, entropy_c = 0.0;

  double total() const;
  /// Name of the first non-finite term, or empty.
  std::string first_non_finite() const;
};

ElboTerms elbo_terms(const VariationalState& state, const Corpus& corpus, const Hyperpriors& hyper,
                     const ViConfig& config);

/// Throws NumericalError naming the offending term when the bound is not finite.
double elbo(const VariationalState& state, const Corpus& corpus, const Hyperpriors& hyper,
            const ViConfig& config);

struct FitTrace {
  struct Row {
    int iteration = 0;
    double elapsed_seconds = 0.0;
    std::optional<double> elbo;  // absent for sampler traces
    double heldout = 0.0;        // NaN when no test tokens
  };
  std::vector<Row> rows;
};

struct FitResult {
  VariationalState state;
  FitTrace trace;  // row 0 evaluates the initial state
  bool converged = false;
};

/// Coordinate-ascent loop in the order counts, loadings, E, T-ascent, rounds,
/// global. Stops after max_iters or once the held-out metric changes by less
/// than convergence_tol on three consecutive iterations (ELBO relative change
/// when the test corpus is empty).
FitResult fit(const Corpus& train, const Corpus& test, const Hyperpriors& hyper, const ViConfig& config);

}  // namespace gammaproc
