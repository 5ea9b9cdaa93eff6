#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gammaproc {

/// One nonzero cell of the vocabulary-by-document count matrix. Ids are
/// 0-based in memory; the UCI reader and writer translate to 1-based.
struct CorpusEntry {
  std::uint32_t word = 0;
  std::uint32_t doc = 0;
  std::uint64_t count = 0;

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

/// Sparse V x N count matrix. Entries are stored sorted by (doc, word) with
/// per-document offsets; zeros are implicit. Immutable after construction.
class Corpus {
 public:
  Corpus() = default;

  /// Validates ids, positivity and uniqueness; throws DomainError otherwise.
  Corpus(std::size_t vocab_size, std::size_t n_docs, std::vector<CorpusEntry> entries);

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t n_docs() const noexcept { return n_docs_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::span<const CorpusEntry> entries() const noexcept { return entries_; }
  std::span<const CorpusEntry> doc_entries(std::size_t doc) const;
  /// Index of the first entry of `doc` within entries().
  std::size_t doc_offset(std::size_t doc) const { return doc_offsets_.at(doc); }

  std::uint64_t total_count() const noexcept { return total_; }
  /// sum_v d_vn for every document n.
  std::vector<double> doc_lengths() const;
  /// sum_n d_vn for every word v.
  std::vector<double> word_totals() const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.vocab_size_ == b.vocab_size_ && a.n_docs_ == b.n_docs_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t vocab_size_ = 0;
  std::size_t n_docs_ = 0;
  std::vector<CorpusEntry> entries_;
  std::vector<std::size_t> doc_offsets_{0};
  std::uint64_t total_ = 0;
};

}  // namespace gammaproc
