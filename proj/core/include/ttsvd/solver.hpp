#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ttsvd/environment.hpp"
#include "ttsvd/tt.hpp"

namespace ttsvd {

struct SolverConfig {
    Index k = 10;
    double epsilon = 1e-8;
    /// Per-core truncation; defaults to epsilon / sqrt(N - 1).
    std::optional<double> delta0;
    double first_halfsweep_delta_factor = 100.0;
    int max_sweeps = 10;
    int max_restarts = 2;
    double restart_delta_factor = 0.1;
    std::uint64_t seed = 1;
    double local_tol = 1e-11;
    int local_max_iterations = 500;
    Index dense_crossover = 600;
    /// Hard cap on every bond rank of U and V.
    Index max_rank = std::numeric_limits<Index>::max();
    /// A^T U is rounded at residual_round_factor * epsilon before the norm.
    double residual_round_factor = 0.1;
    /// Permits K = 1 on the ALS path, where ranks cannot grow.
    bool allow_als_k1 = false;
};

void validate(const SolverConfig& cfg, int n_cores, bool als);

enum class Termination { converged, sweep_limit, restarted };
const char* to_string(Termination t);

enum class HalfSweep { right_to_left, left_to_right };

struct MicroRecord {
    int position = 0;  ///< position the block left (0-based)
    HalfSweep direction = HalfSweep::right_to_left;
    Index rank_u = 0;  ///< new bond rank of U
    Index rank_v = 0;  ///< new bond rank of V
    Vector sigma;
    int local_iterations = 0;
    bool local_converged = true;
};

struct SweepReport {
    std::string solver;
    std::vector<MicroRecord> micro;
    std::vector<double> residuals;  ///< one entry per full sweep, reset on restart
    int sweeps = 0;                 ///< full sweeps across all attempts
    int restarts = 0;
    int local_failures = 0;
    double seconds = 0.0;
    double final_residual = 0.0;
    Termination termination = Termination::sweep_limit;
    std::vector<Index> ranks_u;
    std::vector<Index> ranks_v;
};

struct SvdResult {
    Vector sigma;
    BlockTT u;  ///< block at the last core
    BlockTT v;
    SweepReport report;
};

/// State handed to an observer after every split: U and V with the block at
/// its new position, the local Sigma, and the environments then in use.
struct MicroSnapshot {
    const MicroRecord& record;
    const BlockTT& u;
    const BlockTT& v;
    const Environment& env;
    const MatrixTT& a;
};
using SweepObserver = std::function<void(const MicroSnapshot&)>;

SvdResult als_svd(const MatrixTT& a, const SolverConfig& cfg, const SweepObserver& observer = {});
SvdResult mals_svd(const MatrixTT& a, const SolverConfig& cfg, const SweepObserver& observer = {});

/// Eigen-route baselines on A^T A (rounded), followed by U = A V Sigma^{-1}.
SvdResult als_eig(const MatrixTT& a, const SolverConfig& cfg);
SvdResult mals_eig(const MatrixTT& a, const SolverConfig& cfg);

/// ||A^T U - V Sigma||_F / ||Sigma||_F in TT arithmetic, with A^T U rounded at
/// `round_delta`.
double residual(const MatrixTT& a, const BlockTT& u, const BlockTT& v, const Vector& sigma, double round_delta);

/// Random block TT with the minimal ranks R_n = ceil(K / (I_{n+1} ... I_N)),
/// leading cores left-orthogonal and orthonormal columns, block at the last core.
BlockTT init_block_tt(const std::vector<Index>& modes, Index k, std::uint64_t seed);

}  // namespace ttsvd
