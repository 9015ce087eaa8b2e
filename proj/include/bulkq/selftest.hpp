#pragma once

#include <string>
#include <vector>

namespace bulkq::selftest {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // deterministic; timing is reported separately
    double seconds = 0.0;
};

struct Options {
    int threads = 1;
    // Mutation check: negates expectation_site for the duration of the run.
    bool inject_sign_flip = false;
    // Criterion ids (1-11) to run; empty means all of them.
    std::vector<int> criteria;
};

// Runs the full desk-scale verification suite, one entry per criterion.
std::vector<CriterionResult> run_all(const Options& options = {});

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace bulkq::selftest
