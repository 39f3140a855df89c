// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace vmetrics {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelfCheckOptions {
    // Negative-control hook: flips the sign of lambda inside the gradient
    // under test so the finite-difference suite must fail.
    bool fault_flip_lambda_sign = false;
};

// Fixed-seed oracle/gradient/round-trip suites for the metric and kernel
// implementations. Deterministic across runs.
std::vector<CheckResult> run_self_check(const SelfCheckOptions &options = {});

} // namespace vmetrics
