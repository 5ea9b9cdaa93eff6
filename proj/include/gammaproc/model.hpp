#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gammaproc/corpus.hpp"
#include "gammaproc/crm.hpp"
#include "gammaproc/numeric/rng.hpp"

namespace gammaproc {

/// V x K matrix whose columns are distributions over the vocabulary.
/// Stored column-major so each factor is a contiguous span.
class FactorLoadings {
 public:
  FactorLoadings() = default;
  FactorLoadings(std::size_t vocab_size, std::size_t n_factors, std::vector<double> values);
  FactorLoadings(std::size_t vocab_size, std::size_t n_factors)
      : FactorLoadings(vocab_size, n_factors, std::vector<double>(vocab_size * n_factors, 0.0)) {}

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t n_factors() const noexcept { return n_factors_; }

  double operator()(std::size_t v, std::size_t k) const { return values_[k * vocab_size_ + v]; }
  double& operator()(std::size_t v, std::size_t k) { return values_[k * vocab_size_ + v]; }
  std::span<const double> column(std::size_t k) const;
  std::span<double> column(std::size_t k);
  std::span<const double> values() const noexcept { return values_; }

  void append_column(std::span<const double> column);
  void erase_columns_from(std::size_t k);

  /// Throws DomainError when an entry is negative or a column does not sum
  /// to 1 within `tol`.
  void validate(double tol = 1e-9) const;

 private:
  std::size_t vocab_size_ = 0;
  std::size_t n_factors_ = 0;
  std::vector<double> values_;
};

/// K x N nonnegative factor counts, row-major (each factor's row over
/// documents is contiguous). Integer-valued for sampler states and generated
/// data, real-valued for variational means.
class FactorCounts {
 public:
  FactorCounts() = default;
  FactorCounts(std::size_t n_factors, std::size_t n_docs, std::vector<double> values);
  FactorCounts(std::size_t n_factors, std::size_t n_docs)
      : FactorCounts(n_factors, n_docs, std::vector<double>(n_factors * n_docs, 0.0)) {}

  std::size_t n_factors() const noexcept { return n_factors_; }
  std::size_t n_docs() const noexcept { return n_docs_; }

  double operator()(std::size_t k, std::size_t n) const { return values_[k * n_docs_ + n]; }
  double& operator()(std::size_t k, std::size_t n) { return values_[k * n_docs_ + n]; }
  std::span<const double> row(std::size_t k) const;
  std::span<double> row(std::size_t k);
  std::span<const double> values() const noexcept { return values_; }

  void append_row();
  void erase_rows_from(std::size_t k);

  void validate() const;

 private:
  std::size_t n_factors_ = 0;
  std::size_t n_docs_ = 0;
  std::vector<double> values_;
};

/// Gamma(a1, a2) on alpha, Gamma(b1, b2) on mass, Gamma(c1, c2) on c, and the
/// Dirichlet parameters of every loading column.
struct Hyperpriors {
  double a1 = 1.0, a2 = 1.0;
  double b1 = 1.0, b2 = 1.0;
  double c1 = 1.0, c2 = 1.0;
  std::vector<double> beta;

  static Hyperpriors symmetric(std::size_t vocab_size, double beta);
  void validate() const;
};

struct GroundTruth {
  GammaProcessDraw draw;
  FactorLoadings loadings;
  FactorCounts counts;
};

struct SyntheticCorpus {
  Corpus corpus;
  GroundTruth truth;
};

/// Draw atoms with the theorem-form stick, z_nk ~ Poisson(weight_k), loading
/// columns ~ Dirichlet(beta), and d_vn ~ Poisson((Phi Z)_vn).
SyntheticCorpus generate_synthetic(const GammaProcessParams& params, const Hyperpriors& hyper,
                                   std::size_t vocab_size, std::size_t n_docs, int rounds,
                                   const SeededRng& rng);

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// Token-level split: every unit of count goes to train independently with
/// probability train_fraction. train + test reproduces the input exactly.
CorpusSplit train_test_split(const Corpus& corpus, double train_fraction, const SeededRng& rng);

/// Average log probability of the test tokens under the globally normalized
/// rate matrix p_vn = (Phi Z)_vn / sum (Phi Z).
double heldout_per_word_loglik(const Corpus& test, const FactorLoadings& loadings,
                               const FactorCounts& counts);

/// Held-out metric for a running average of rate matrices Phi Z, as used for
/// sampler traces. Only the rates at test cells and the grand total are kept.
class HeldoutAccumulator {
 public:
  explicit HeldoutAccumulator(const Corpus& test);

  void add(const FactorLoadings& loadings, const FactorCounts& counts);
  std::size_t samples() const noexcept { return samples_; }
  /// Throws EvaluationError when no rate mass has been accumulated.
  double value() const;

 private:
  const Corpus* test_;
  std::vector<double> cell_rates_;
  double total_rate_ = 0.0;
  std::size_t samples_ = 0;
};

}  // namespace gammaproc
