// Acceptance run: one line per criterion, exit status 0 iff all pass.

#include "sbjo/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  sbjo::SuiteOptions opts;
  if (const char* s = std::getenv("SBJO_SEED")) opts.seed = std::stoull(s);
  for (int i = 1; i < argc; ++i) opts.only.push_back(argv[i]);
  const auto results = sbjo::run_suite(opts, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 && !results.empty() ? 0 : 1;
}
