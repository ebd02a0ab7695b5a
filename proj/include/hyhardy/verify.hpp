// verify.hpp — named invariant suites over the library: closed-form kernel
// oracles, rescaling invariance, the Hardy bound, the conformal reduction
// identities, and the mass solver's self-checks. Each check reports the
// measured quantity and the gate it was held to, so a report is auditable
// without rerunning anything.
#pragma once

#include <string>
#include <vector>

namespace hyhardy {

struct CheckResult {
  std::string name;
  bool passed = false;
  // Informational checks are recorded (measured value + note) but never
  // fail a suite; used where the contract is "log the comparison".
  bool informational = false;
  double measured = 0.0;  // the quantity the gate applies to
  double tolerance = 0.0; // the gate
  std::string note;       // context: config, ratio report, ...
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_passed() const; // ignores informational checks
};

// suite is one of: kernels, scaling, hardy, conformal, mass, all.
// Throws validation_error for an unknown suite name.
VerifyReport run_verify_suite(const std::string& suite);

} // namespace hyhardy
