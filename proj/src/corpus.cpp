#include "gammaproc/corpus.hpp"

#include <algorithm>
#include <string>

#include "gammaproc/error.hpp"

namespace gammaproc {

Corpus::Corpus(std::size_t vocab_size, std::size_t n_docs, std::vector<CorpusEntry> entries)
    : vocab_size_(vocab_size), n_docs_(n_docs), entries_(std::move(entries)) {
  if (vocab_size_ == 0 || n_docs_ == 0) throw DomainError("corpus dimensions must be positive");
  for (const auto& e : entries_) {
    if (e.word >= vocab_size_ || e.doc >= n_docs_) {
      throw DomainError("corpus entry out of range: word " + std::to_string(e.word) + ", doc " +
                        std::to_string(e.doc));
    }
    if (e.count == 0) throw DomainError("corpus counts must be positive");
  }
  std::sort(entries_.begin(), entries_.end(), [](const CorpusEntry& a, const CorpusEntry& b) {
    return a.doc != b.doc ? a.doc < b.doc : a.word < b.word;
  });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].doc == entries_[i - 1].doc && entries_[i].word == entries_[i - 1].word) {
      throw DomainError("duplicate corpus entry: word " + std::to_string(entries_[i].word) + ", doc " +
                        std::to_string(entries_[i].doc));
    }
  }
  doc_offsets_.assign(n_docs_ + 1, 0);
  for (const auto& e : entries_) {
    ++doc_offsets_[e.doc + 1];
    total_ += e.count;
  }
  for (std::size_t n = 0; n < n_docs_; ++n) doc_offsets_[n + 1] += doc_offsets_[n];
}

std::span<const CorpusEntry> Corpus::doc_entries(std::size_t doc) const {
  if (doc >= n_docs_) throw DomainError("document index out of range");
  return std::span<const CorpusEntry>(entries_).subspan(doc_offsets_[doc],
                                                         doc_offsets_[doc + 1] - doc_offsets_[doc]);
}

std::vector<double> Corpus::doc_lengths() const {
  std::vector<double> out(n_docs_, 0.0);
  for (const auto& e : entries_) out[e.doc] += static_cast<double>(e.count);
  return out;
}

std::vector<double> Corpus::word_totals() const {
  std::vector<double> out(vocab_size_, 0.0);
  for (const auto& e : entries_) out[e.word] += static_cast<double>(e.count);
  return out;
}

}  // namespace gammaproc
