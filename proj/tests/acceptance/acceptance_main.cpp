#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "harness/acceptance.hpp"

// Prints one PASS/FAIL line per acceptance criterion. Arguments select a
// subset of criteria by number.
int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    int failed = 0;
    ttsvd::acceptance::run_criteria(ids, [&](const ttsvd::acceptance::CriterionResult& r) {
        std::cout << ttsvd::acceptance::format_line(r) << std::endl;
        if (!r.passed) ++failed;
    });
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
