// Runs every acceptance criterion at full replication and prints one line per
// criterion. Exit status is nonzero when a gating criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "gammaproc/validation.hpp"

int main(int argc, char** argv) {
  gammaproc::ValidationOptions opt;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--quick") opt.quick = true;
    else if (a == "--verbose") opt.log = &std::cerr;
    else if (a == "--seed" && i + 1 < argc) opt.seed = std::strtoull(argv[++i], nullptr, 10);
    else if (a == "--corpus" && i + 1 < argc) opt.real_corpus = argv[++i];
    else {
      std::cerr << "usage: acceptance [--quick] [--verbose] [--seed N] [--corpus PATH]\n";
      return 2;
    }
  }
  const auto results = gammaproc::run_validation(opt);
  for (const auto& r : results) std::cout << gammaproc::format_check(r) << '\n' << std::flush;
  const bool ok = gammaproc::all_passed(results);
  std::cout << (ok ? "acceptance: all gating criteria passed" : "acceptance: FAILED") << '\n';
  return ok ? 0 : 1;
}
