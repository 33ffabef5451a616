#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qdef {

// One named property of the toolkit verified at a fixed seed. `detail` is a
// one-line numeric summary (counts, worst margins) produced whether or not
// the check passed, so failures are diagnosable from the table alone.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs every check. `full` uses the complete sample counts; the quick suite
// shrinks them to smoke-test size. Checks are independent and each derives
// its randomness from (seed, check name), so the results are a pure function
// of (full, seed).
std::vector<CheckResult> run_selfcheck(bool full, std::uint64_t seed);

// Deterministic text table: one line per check plus a final tally line.
// Contains no timing or environment information, so identical inputs render
// identical bytes.
std::string selfcheck_table(const std::vector<CheckResult>& results);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace qdef
