#ifndef SBJO_ACCEPTANCE_HPP
#define SBJO_ACCEPTANCE_HPP

// The acceptance suite: twelve seeded, property-based criteria with the
// tolerances pinned below.  Shared by the acceptance test binary and
// `sbjo suite`.

#include "sbjo/algebra.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace sbjo {

struct CriterionResult {
  int id = 0;
  std::string group;
  std::string title;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, long long>> counts;
  double seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  ToleranceConfig tol;
  /// Groups or criterion numbers to run; empty runs everything.
  std::vector<std::string> only;
};

/// Group name of each criterion, index 1..12.
const std::vector<std::string>& criterion_groups();

/// Throws InvalidSpec for an unknown group name or number in options.only.
std::vector<CriterionResult> run_suite(const SuiteOptions& options, std::ostream* log = nullptr);

/// One line per criterion: "criterion  N  group  PASS|FAIL  detail  (t s)".
std::string format_result(const CriterionResult& r);

}  // namespace sbjo

#endif
