#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gammaproc/corpus.hpp"
#include "gammaproc/mcmc.hpp"
#include "gammaproc/model.hpp"
#include "gammaproc/numeric/rng.hpp"
#include "gammaproc/vi.hpp"

namespace gammaproc {

enum class CheckStatus { pass, fail, skip };

struct CheckResult {
  int id = 0;
  std::string name;
  CheckStatus status = CheckStatus::fail;
  std::string observed;
  std::string required;
  double seconds = 0.0;
  bool gating = true;
};

struct ValidationOptions {
  bool quick = false;
  std::uint64_t seed = 1;
  /// UCI corpus for the real-data comparison; GAMMAPROC_PSYREV is read when unset.
  std::optional<std::filesystem::path> real_corpus;
  /// Progress notes, one line each; may be null.
  std::ostream* log = nullptr;
};

/// A small random variational problem: every parameter drawn from a broad
/// positive range so updates and gradients are exercised away from defaults.
struct ViProblem {
  Corpus corpus;
  Hyperpriors hyper;
  ViConfig config;
  VariationalState state;
};

ViProblem random_vi_problem(SeededRng rng, std::size_t atoms = 4, int max_rounds = 5, std::size_t docs = 6,
                            std::size_t vocab = 7);

/// Max relative error between grad_T and central differences of the ELBO in
/// (u_k, v_k), over every atom of the problem.
double gradient_check(const ViProblem& problem);

/// The synthetic setting shared by the convergence and agreement checks:
/// V=50, N=300, alpha=c=1, mass=5, beta=0.5, rounds chosen for truncation
/// error 0.01, 80/20 token split.
struct SyntheticBenchmark {
  SyntheticCorpus data;
  CorpusSplit split;
  Hyperpriors hyper;
};

SyntheticBenchmark synthetic_benchmark(std::uint64_t seed);

CheckResult check_construction_moments(const ValidationOptions& opt);
CheckResult check_total_mass_law(const ValidationOptions& opt);
CheckResult check_representation_equivalence(const ValidationOptions& opt);
CheckResult check_truncation_bound(const ValidationOptions& opt);
CheckResult check_gradient_consistency(const ValidationOptions& opt);
CheckResult check_closed_form_monotonicity(const ValidationOptions& opt);
CheckResult check_synthetic_convergence(const ValidationOptions& opt);
CheckResult check_vi_mcmc_agreement(const ValidationOptions& opt);
CheckResult check_sampler_units(const ValidationOptions& opt);
CheckResult check_real_corpus(const ValidationOptions& opt);

std::vector<CheckResult> run_validation(const ValidationOptions& opt);

/// "PASS  3  representation equivalence  observed ...  required ...  (1.2 s)"
std::string format_check(const CheckResult& result);

/// True when no gating check failed.
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace gammaproc
