#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ttsvd/solver.hpp"

namespace ttsvd::harness {

inline constexpr int config_schema_version = 1;

enum class Experiment { prescribed_svd, hilbert, tridiagonal, toeplitz, custom };
const char* to_string(Experiment e);

/// Kind-specific generator parameters; unused fields are ignored by a kind.
struct GeneratorParams {
    std::vector<double> betas{0.5};     ///< prescribed_svd: spectrum decay
    Index k0 = 25;                      ///< prescribed_svd: exact rank
    Index rank = 5;                     ///< block ranks (prescribed) or chain ranks (tridiagonal, toeplitz)
    double delta = 1e-8;                ///< hilbert: generator compression tolerance
    int hilbert_max_n = 22;
    double round_delta = 1e-13;         ///< rounding applied to assembled matrices
    std::vector<Index> rank_caps;       ///< toeplitz: R_max values; empty means uncapped
    std::filesystem::path matrix_path;  ///< custom: serialized matrix TT
    int truth_max_n = 10;               ///< dense ground truth is computed up to this N
};

struct RunConfig {
    int schema_version = config_schema_version;
    Experiment experiment = Experiment::prescribed_svd;
    std::vector<int> n_values{10};
    std::vector<std::string> solvers{"als_svd"};
    int repetitions = 5;
    std::uint64_t seed = 1;
    GeneratorParams generator;
    SolverConfig solver;
    std::filesystem::path out_dir = "out";
};

inline const std::vector<std::string>& known_solvers() {
    static const std::vector<std::string> names{"als_svd", "mals_svd", "als_eig", "mals_eig"};
    return names;
}

/// Parses a JSON document; throws ConfigError on unknown keys, wrong types or
/// inconsistent values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
void validate(const RunConfig& cfg);

/// Comma-separated solver list.
std::vector<std::string> parse_solver_list(const std::string& list);

}  // namespace ttsvd::harness
