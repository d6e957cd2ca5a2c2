#pragma once

#include <string>
#include <vector>

namespace sdd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // measured value vs bound
};

/// Self-contained invariant checks (normalization, partition of unity,
/// orthonormality, counting identities, baseline equivalence, round trips).
/// Each check runs in at most a few seconds.
std::vector<CheckResult> run_verification(int threads = 0);

}  // namespace sdd
