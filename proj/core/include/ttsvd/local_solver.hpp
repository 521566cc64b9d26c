#pragma once

#include <cstdint>
#include <functional>

#include "ttsvd/dense.hpp"

namespace ttsvd {

/// Applies a linear map to every column of its argument.
using BlockOperator = std::function<Matrix(const Matrix&)>;

struct LocalSolverOptions {
    double tol = 1e-11;          ///< residual tolerance relative to the largest Ritz value
    int max_iterations = 500;    ///< block expansion steps
    Index dense_crossover = 600; ///< dense solve when the operator dimension is at most this
    Index extra = 4;             ///< Ritz pairs tracked beyond 2K
    std::uint64_t seed = 0;
};

struct LocalSvd {
    Matrix u;   ///< m x K, orthonormal columns
    Vector s;   ///< K values, non-increasing
    Matrix v;   ///< n x K, orthonormal columns
    int iterations = 0;
    bool converged = true;
    bool dense = false;
};

/// K dominant singular triplets of the m x n map `matvec` (with transpose
/// `rmatvec`) through the K largest eigenpairs of [[0, A], [A^T, 0]]. Warm
/// starts from u0/v0 when given. The left vectors are sign-fixed so that the
/// largest-magnitude entry of each column is positive.
LocalSvd local_block_svd(const BlockOperator& matvec, const BlockOperator& rmatvec, Index m, Index n, Index k,
                         const LocalSolverOptions& opts, const Matrix* u0 = nullptr, const Matrix* v0 = nullptr);

struct LocalEig {
    Vector values;   ///< K largest eigenvalues, non-increasing
    Matrix vectors;  ///< n x K, orthonormal
    int iterations = 0;
    bool converged = true;
    bool dense = false;
};

/// K largest eigenpairs of the symmetric n x n map `op`.
LocalEig local_symmetric_eig(const BlockOperator& op, Index n, Index k, const LocalSolverOptions& opts,
                             const Matrix* x0 = nullptr);

/// Flips column signs so that the largest-magnitude entry of each column of
/// `lead` is positive; `follow` (if non-null) is flipped alongside.
void fix_signs(Matrix& lead, Matrix* follow);

}  // namespace ttsvd
