#pragma once

// Reduced-density invariant suite shared by `entbase validate` and the tests.

#include "entbase/protocol.hpp"

#include <functional>
#include <string>
#include <vector>

namespace entbase {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

using ProbabilityModel = std::function<RawProbabilities(const AstroVisibility&, const XState&)>;

struct SuiteOptions {
  bool fast = false;  // skip the Monte Carlo checks
  unsigned threads = 1;
  // Closed-form detection probabilities under test; replaced by the
  // mutation test to confirm the oracle comparison can fail.
  ProbabilityModel closed_form = raw_probabilities;
};

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options = {});

}  // namespace entbase
