#pragma once

#include <string>
#include <vector>

namespace subsim {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast invariant checks over every module (a few seconds; `quick` trims
/// the statistical ones further).
[[nodiscard]] std::vector<CheckResult> run_selftest(bool quick);

}  // namespace subsim
