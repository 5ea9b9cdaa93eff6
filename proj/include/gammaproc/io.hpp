#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gammaproc/corpus.hpp"
#include "gammaproc/mcmc.hpp"
#include "gammaproc/model.hpp"
#include "gammaproc/vi.hpp"

namespace gammaproc {

// UCI bag-of-words: three header lines D, W, NNZ, then NNZ lines
// "docID wordID count" with 1-based ids. Lines starting with '#' are skipped.
Corpus parse_uci_bow(std::istream& in);
Corpus parse_uci_bow(const std::filesystem::path& path);
void write_uci_bow(std::ostream& out, const Corpus& corpus, const std::vector<std::string>& comments = {});
void write_uci_bow(const std::filesystem::path& path, const Corpus& corpus,
                   const std::vector<std::string>& comments = {});

/// CSV "iteration,elapsed_seconds,elbo,heldout_loglik", values to 10
/// significant digits, empty elbo cells for traces without a bound.
/// Comment lines, when given, precede the header.
void write_trace(std::ostream& out, const FitTrace& trace, const std::vector<std::string>& comments = {});
void write_trace(const std::filesystem::path& path, const FitTrace& trace,
                 const std::vector<std::string>& comments = {});
FitTrace read_trace(std::istream& in);

/// Plain-text snapshots made of [section] blocks of key=value lines. Every dump
/// has [model] (kind and shapes), [loadings] and [counts]; variational dumps add
/// [vi], sampler dumps add [chain], ground-truth dumps add [truth].
void write_state(std::ostream& out, const VariationalState& state, const std::vector<std::string>& comments = {});
void write_state(std::ostream& out, const ChainState& state, const std::vector<std::string>& comments = {});
void write_state(std::ostream& out, const GroundTruth& truth, const std::vector<std::string>& comments = {});

struct LoadedState {
  std::string kind;  // "vi", "chain" or "truth"
  FactorLoadings loadings;
  FactorCounts counts;
  std::optional<VariationalState> vi;
  std::optional<ChainState> chain;
};

LoadedState read_state(std::istream& in);
LoadedState read_state(const std::filesystem::path& path);

}  // namespace gammaproc
