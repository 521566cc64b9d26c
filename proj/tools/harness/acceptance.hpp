#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ttsvd::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

using CriterionSink = std::function<void(const CriterionResult&)>;

inline constexpr int criterion_count = 10;

/// Runs one criterion (1..10); tolerances are fixed inside each check.
CriterionResult run_criterion(int id);

/// Runs the listed criteria (all when empty), reporting each as it finishes.
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, const CriterionSink& sink = {});

std::string format_line(const CriterionResult& r);

}  // namespace ttsvd::acceptance
