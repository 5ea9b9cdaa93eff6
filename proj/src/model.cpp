#include "gammaproc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gammaproc/error.hpp"
#include "gammaproc/kernels.hpp"
#include "gammaproc/numeric/distributions.hpp"

namespace gammaproc {

// ---- FactorLoadings ---------------------------------------------------------

FactorLoadings::FactorLoadings(std::size_t vocab_size, std::size_t n_factors, std::vector<double> values)
    : vocab_size_(vocab_size), n_factors_(n_factors), values_(std::move(values)) {
  if (values_.size() != vocab_size_ * n_factors_) throw DomainError("FactorLoadings: size mismatch");
}

std::span<const double> FactorLoadings::column(std::size_t k) const {
  return std::span<const double>(values_).subspan(k * vocab_size_, vocab_size_);
}

std::span<double> FactorLoadings::column(std::size_t k) {
  return std::span<double>(values_).subspan(k * vocab_size_, vocab_size_);
}

void FactorLoadings::append_column(std::span<const double> column) {
  if (column.size() != vocab_size_) throw DomainError("FactorLoadings: column length mismatch");
  values_.insert(values_.end(), column.begin(), column.end());
  ++n_factors_;
}

void FactorLoadings::erase_columns_from(std::size_t k) {
  if (k >= n_factors_) return;
  values_.resize(k * vocab_size_);
  n_factors_ = k;
}

void FactorLoadings::validate(double tol) const {
  for (std::size_t k = 0; k < n_factors_; ++k) {
    double s = 0.0;
    for (double x : column(k)) {
      if (!(x >= 0.0)) throw DomainError("FactorLoadings: negative entry in column " + std::to_string(k));
      s += x;
    }
    if (std::abs(s - 1.0) > tol) throw DomainError("FactorLoadings: column " + std::to_string(k) + " sums to " + std::to_string(s));
  }
}

// ---- FactorCounts -----------------------------------------------------------

FactorCounts::FactorCounts(std::size_t n_factors, std::size_t n_docs, std::vector<double> values)
    : n_factors_(n_factors), n_docs_(n_docs), values_(std::move(values)) {
  if (values_.size() != n_factors_ * n_docs_) throw DomainError("FactorCounts: size mismatch");
}

std::span<const double> FactorCounts::row(std::size_t k) const {
  return std::span<const double>(values_).subspan(k * n_docs_, n_docs_);
}

std::span<double> FactorCounts::row(std::size_t k) {
  return std::span<double>(values_).subspan(k * n_docs_, n_docs_);
}

void FactorCounts::append_row() {
  values_.resize(values_.size() + n_docs_, 0.0);
  ++n_factors_;
}

void FactorCounts::erase_rows_from(std::size_t k) {
  if (k >= n_factors_) return;
  values_.resize(k * n_docs_);
  n_factors_ = k;
}

void FactorCounts::validate() const {
  for (double x : values_) {
    if (!(x >= 0.0)) throw DomainError("FactorCounts: negative or NaN entry");
  }
}

// ---- Hyperpriors ------------------------------------------------------------

Hyperpriors Hyperpriors::symmetric(std::size_t vocab_size, double beta) {
  Hyperpriors h;
  h.beta.assign(vocab_size, beta);
  return h;
}

void Hyperpriors::validate() const {
  for (double x : {a1, a2, b1, b2, c1, c2}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("hyperprior shapes and rates must be positive");
  }
  if (beta.empty()) throw DomainError("Dirichlet parameters beta are empty");
  for (double b : beta) {
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("Dirichlet parameters beta must be positive");
  }
}

// ---- generation and splitting -------------------------------------------------

SyntheticCorpus generate_synthetic(const GammaProcessParams& params, const Hyperpriors& hyper,
                                   std::size_t vocab_size, std::size_t n_docs, int rounds,
                                   const SeededRng& rng) {
  if (vocab_size == 0 || n_docs == 0) throw DomainError("generate_synthetic: dimensions must be positive");
  hyper.validate();
  if (hyper.beta.size() != vocab_size) throw DomainError("generate_synthetic: beta length != vocab_size");

  GammaProcessDraw draw = draw_stick(params, rounds, StickVariant::theorem, rng.substream("atoms"));
  const std::size_t K = draw.atoms.size();

  FactorCounts counts(K, n_docs);
  for (std::size_t n = 0; n < n_docs; ++n) {
    SeededRng doc_rng = rng.substream({0x7a, n});
    for (std::size_t k = 0; k < K; ++k) {
      counts(k, n) = static_cast<double>(sample_poisson(draw.atoms[k].weight, doc_rng));
    }
  }

  FactorLoadings loadings(vocab_size, K);
  for (std::size_t k = 0; k < K; ++k) {
    SeededRng col_rng = rng.substream({0x9f, k});
    const auto col = sample_dirichlet(hyper.beta, col_rng);
    std::copy(col.begin(), col.end(), loadings.column(k).begin());
  }

  std::vector<CorpusEntry> entries;
  std::vector<double> rates(vocab_size);
  for (std::size_t n = 0; n < n_docs; ++n) {
    std::fill(rates.begin(), rates.end(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      if (counts(k, n) > 0.0) kernels::axpy(counts(k, n), loadings.column(k), rates);
    }
    SeededRng doc_rng = rng.substream({0xd0, n});
    for (std::size_t v = 0; v < vocab_size; ++v) {
      if (rates[v] <= 0.0) continue;
      const auto d = sample_poisson(rates[v], doc_rng);
      if (d > 0) entries.push_back({static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(n), d});
    }
  }

  return {Corpus(vocab_size, n_docs, std::move(entries)),
          GroundTruth{std::move(draw), std::move(loadings), std::move(counts)}};
}

CorpusSplit train_test_split(const Corpus& corpus, double train_fraction, const SeededRng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train_test_split: train_fraction must lie in (0, 1)");
  }
  std::vector<CorpusEntry> train;
  std::vector<CorpusEntry> test;
  for (std::size_t n = 0; n < corpus.n_docs(); ++n) {
    SeededRng doc_rng = rng.substream(n);
    for (const auto& e : corpus.doc_entries(n)) {
      const auto kept = sample_binomial(e.count, train_fraction, doc_rng);
      if (kept > 0) train.push_back({e.word, e.doc, kept});
      if (kept < e.count) test.push_back({e.word, e.doc, e.count - kept});
    }
  }
  return {Corpus(corpus.vocab_size(), corpus.n_docs(), std::move(train)),
          Corpus(corpus.vocab_size(), corpus.n_docs(), std::move(test))};
}

// ---- held-out metric ----------------------------------------------------------

namespace {

void check_dims(const Corpus& test, const FactorLoadings& loadings, const FactorCounts& counts) {
  if (loadings.vocab_size() != test.vocab_size() || counts.n_docs() != test.n_docs() ||
      loadings.n_factors() != counts.n_factors()) {
    throw DomainError("held-out metric: inconsistent dimensions");
  }
}

// Rates (Phi Z)_vn / scale at every test cell plus their grand total. Dividing
// Z by its own largest entry first makes the normalized rates identical for Z
// and sZ whenever sZ is exact.
double test_cell_rates(const Corpus& test, const FactorLoadings& loadings, const FactorCounts& counts,
                       std::span<double> cell_rates, bool rescale) {
  const std::size_t K = loadings.n_factors();
  const std::size_t V = loadings.vocab_size();
  std::vector<double> phi_rows(V * K);  // row-major copy: each word's loadings contiguous
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto col = loadings.column(k);
    for (std::size_t v = 0; v < V; ++v) phi_rows[v * K + k] = col[v];
  }
  double scale = 1.0;
  if (rescale) {
    double largest = 0.0;
    for (double x : counts.values()) largest = std::max(largest, x);
    if (largest > 0.0) scale = largest;
  }
  std::vector<double> zrow(counts.n_docs());
  for (std::size_t k = 0; k < K; ++k) {
    const auto row = counts.row(k);
    for (std::size_t n = 0; n < row.size(); ++n) zrow[n] = row[n] / scale;
    total += kernels::sum(loadings.column(k)) * kernels::sum(zrow);
  }
  std::vector<double> z(K);
  for (std::size_t n = 0; n < test.n_docs(); ++n) {
    const auto cells = test.doc_entries(n);
    if (cells.empty()) continue;
    for (std::size_t k = 0; k < K; ++k) z[k] = counts(k, n) / scale;
    const std::size_t base = test.doc_offset(n);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      cell_rates[base + i] = kernels::dot(std::span<const double>(phi_rows).subspan(cells[i].word * K, K), z);
    }
  }
  return total;
}

double normalized_loglik(const Corpus& test, std::span<const double> cell_rates, double total) {
  if (test.total_count() == 0) throw EvaluationError("held-out metric: test corpus has no tokens");
  if (!(total > 0.0)) throw EvaluationError("held-out metric: rate matrix is identically zero");
  double acc = 0.0;
  const auto entries = test.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    acc += static_cast<double>(entries[i].count) * std::log(cell_rates[i] / total);
  }
  return acc / static_cast<double>(test.total_count());
}

}  // namespace

double heldout_per_word_loglik(const Corpus& test, const FactorLoadings& loadings, const FactorCounts& counts) {
  check_dims(test, loadings, counts);
  std::vector<double> rates(test.nnz(), 0.0);
  const double total = test_cell_rates(test, loadings, counts, rates, true);
  return normalized_loglik(test, rates, total);
}

HeldoutAccumulator::HeldoutAccumulator(const Corpus& test) : test_(&test), cell_rates_(test.nnz(), 0.0) {}

void HeldoutAccumulator::add(const FactorLoadings& loadings, const FactorCounts& counts) {
  check_dims(*test_, loadings, counts);
  std::vector<double> rates(test_->nnz(), 0.0);
  total_rate_ += test_cell_rates(*test_, loadings, counts, rates, false);
  for (std::size_t i = 0; i < rates.size(); ++i) cell_rates_[i] += rates[i];
  ++samples_;
}

double HeldoutAccumulator::value() const {
  if (samples_ == 0) throw EvaluationError("held-out accumulator is empty");
  // The 1/samples averaging factor cancels in the normalization.
  return normalized_loglik(*test_, cell_rates_, total_rate_);
}

}  // namespace gammaproc
