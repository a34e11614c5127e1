#pragma once

// Invariant suite behind `jspec verify`: every cross-route consistency the
// library can check for one configuration.  q-Laguerre checks run only for
// the geometric sequence.

#include <string>
#include <vector>

#include "jtrace/config.hpp"

namespace jtrace {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst value seen
  double threshold = 0.0;
  std::string note;        // failure message or detail
};

std::vector<CheckResult> run_verify(const RunConfig& cfg);

/// One line per check: "PASS name measured <= threshold".
std::string format_checks(const std::vector<CheckResult>& checks);

}  // namespace jtrace
