#pragma once

// Built-in verification suite: closed-form and property-based checks of the
// toolkit's core guarantees, runnable at desk scale. Each criterion prints
// one PASS/FAIL line. Used by both the `acceptance` test binary and the
// `holocenter selftest` command.

#include <iosfwd>
#include <string>
#include <vector>

namespace holocenter::acceptance {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<CriterionResult> run_all(std::ostream& os);

// Number of failed criteria (0 = all green).
int failures(const std::vector<CriterionResult>& results);

}  // namespace holocenter::acceptance
