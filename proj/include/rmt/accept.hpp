#pragma once
// End-to-end acceptance suite: one numbered check per library guarantee,
// each validating a closed form against independently sampled ensembles at
// fixed sizes and seeds.  Used by the standalone acceptance binary and by
// the CLI selftest.

#include <functional>
#include <string>
#include <vector>

namespace rmt::accept {

struct Criterion {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

using Progress = std::function<void(const Criterion&)>;

// Runs all criteria in order; `progress` (if set) is invoked as each one
// finishes.  Never throws: an exception inside a criterion fails it with
// the message in `detail`.
std::vector<Criterion> run_all(const Progress& progress = {});

// Criteria that fail for documented reasons outside the library's control
// (finite-size bias of published asymptotic formulas).  The gate mode of
// the acceptance binary tolerates exactly these.
const std::vector<int>& known_limitations();

}  // namespace rmt::accept
