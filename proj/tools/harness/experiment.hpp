#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace ttsvd::harness {

/// One solver run, or (rep < 0) the mean over repetitions of a group with the
/// matching *_std columns filled.
struct ResultRow {
    std::string experiment;
    std::string solver;
    int n = 0;
    Index k = 0;
    std::string param_name;  ///< "beta", "R_max" or empty
    double param = 0.0;
    int rep = 0;             ///< repetition index, -1 for the aggregate row
    double sweeps = 0.0;
    double residual = 0.0;
    double residual_std = 0.0;
    std::optional<double> spectrum_error;  ///< empty without ground truth
    double spectrum_error_std = 0.0;
    double max_rank_v = 0.0;
    std::string termination;
    std::uint64_t seed = 0;
    // Kept out of results.csv so that file is reproducible byte for byte.
    double seconds = 0.0;
    double seconds_std = 0.0;
    double construct_seconds = 0.0;

    [[nodiscard]] bool aggregate() const { return rep < 0; }
};

struct RunOutcome {
    std::vector<ResultRow> rows;  ///< per-run rows in canonical order, then aggregates
    int unconverged = 0;          ///< runs that must converge but hit the sweep limit
    int failures = 0;             ///< runs aborted by a solver error
};

using ProgressSink = std::function<void(const std::string&)>;

SvdResult run_solver(const std::string& name, const MatrixTT& a, const SolverConfig& cfg);

/// Runs every (N, parameter, repetition, solver) combination of the config.
RunOutcome run_experiment(const RunConfig& cfg, const ProgressSink& progress = {});

/// Toeplitz runs under a hard rank cap per R_max value; convergence is not required.
RunOutcome toeplitz_capped_rank_experiment(const RunConfig& cfg, const ProgressSink& progress = {});

/// Mean and sample standard deviation per (experiment, solver, N, parameter) group.
std::vector<ResultRow> aggregate_rows(const std::vector<ResultRow>& rows);

/// Relative Frobenius error of the leading entries.
double spectrum_error(const Vector& sigma, const Vector& truth);

}  // namespace ttsvd::harness
