#pragma once

#include <functional>

#include "ttsvd/solver.hpp"

namespace ttsvd::detail {

enum class Method { als, mals };

/// svd: U^T A V with separate U and V chains. eig: V^T M V with M symmetric
/// and U identical to V; Sigma holds the square roots of the eigenvalues.
enum class Mode { svd, eig };

/// Residual used by the stopping rule, evaluated once per full sweep.
using StopMeasure = std::function<double(const BlockTT& u, const BlockTT& v, const Vector& sigma)>;

SvdResult run_sweeps(const MatrixTT& op, Method method, Mode mode, const SolverConfig& cfg,
                     const StopMeasure& stop, const SweepObserver& observer, const char* name);

}  // namespace ttsvd::detail
