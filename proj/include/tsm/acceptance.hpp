#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tsm::acceptance
{
    struct CriterionResult
    {
        int id = 0;
        std::string name;
        bool passed = false;
        std::string detail;
        double seconds = 0.0;
    };

    /// Runs every end-to-end acceptance criterion, writing one PASS/FAIL line per
    /// criterion to `log` as it completes.
    std::vector<CriterionResult> run_all(std::ostream& log);
}  // namespace tsm::acceptance
