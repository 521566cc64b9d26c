#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace ttsvd::harness {

/// Least-squares fit seconds = slope * N + intercept over one solver's runs.
struct ScalingFit {
    std::string experiment;
    std::string solver;
    std::string param_name;
    double param = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<int> n;
    std::vector<double> seconds;  ///< mean seconds per N
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;  ///< 1 when the data has no spread to explain
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// One fit per (experiment, solver, parameter), using the per-repetition rows.
std::vector<ScalingFit> scaling_report(const std::vector<ResultRow>& rows);

std::string scaling_json(const std::vector<ScalingFit>& fits, int indent = 2);

/// Writes report.json and plotdata/<experiment>_<solver>[_<param>].tsv under `dir`.
void write_report(const std::filesystem::path& dir, const std::vector<ResultRow>& rows);

}  // namespace ttsvd::harness
