#pragma once

#include <cstdint>
#include <vector>

#include "ttsvd/tt.hpp"

namespace ttsvd {

// Generators for quantized matrices: every mode has size 2 unless stated.

/// Identity of size prod(modes), all ranks 1.
MatrixTT identity_tt(int n, Index mode = 2);

/// Standard-normal cores with ranks min(rank, 2^n, 2^{N-n}), left-orthogonalized
/// through the last core.
VectorTT random_vector_tt(int n, Index rank, std::uint64_t seed);

/// K orthonormal columns, block at the last core. Bond n is clipped to
/// [ceil(K / 2^{N-n}), 2^n] around `rank`.
BlockTT random_block_tt(int n, Index k, Index rank, std::uint64_t seed);
/// Same with explicit mode sizes and bond ranks R_0..R_N.
BlockTT random_block_tt(const std::vector<Index>& modes, const std::vector<Index>& ranks, Index k,
                        std::uint64_t seed);

/// Standard-normal 4th-order cores with ranks min(rank, 4^n, 4^{N-n}).
MatrixTT random_matrix_tt(int n, Index rank, std::uint64_t seed);

/// Upper triangular Toeplitz matrix T(i, j) = s(j - i - 1) for j > i (0-based).
MatrixTT toeplitz_tt(const VectorTT& s);
/// Upper anti-triangular Hankel matrix H(i, j) = s(2^N - 2 - i - j) for i + j <= 2^N - 2.
MatrixTT hankel_tt(const VectorTT& s);
/// Toeplitz matrix A(i, j) = x(2^N - 1 + i - j) (0-based) from x with N+1 cores.
MatrixTT full_toeplitz_tt(const VectorTT& x);
/// The first 2^{N-1} columns of hankel_tt(s). The top column bit is fixed to 0
/// and folded into core N-1, so the result has N-1 cores with a last core of
/// row size 4 and column size 2.
MatrixTT hankel_submatrix_tt(const VectorTT& s);

struct HilbertTT {
    MatrixTT matrix;                      ///< h(i, j) = 1/(i + j + 1), 0-based, 2^N x 2^{N-1}
    std::vector<Index> generator_ranks;   ///< ranks of the compressed generating vector
};
inline constexpr int default_hilbert_max_n = 22;
HilbertTT hilbert_submatrix_tt(int n, double delta, int max_n = default_hilbert_max_n);

/// Ones on the first superdiagonal.
MatrixTT shift_tt(int n);
/// Ones on the first subdiagonal.
MatrixTT shift_transpose_tt(int n);

/// Sub-diagonal (i+1, i) = a(i), diagonal (i, i) = b(i), super-diagonal
/// (i, i+1) = c(i+1), assembled as F^T diag(a) + diag(b) + F diag(c) and
/// rounded at `round_delta`.
MatrixTT tridiagonal_tt(const VectorTT& a, const VectorTT& b, const VectorTT& c, double round_delta = 1e-13);

struct PrescribedSvd {
    MatrixTT a;        ///< U0 diag(spectrum) V0^T, exact Kronecker assembly
    BlockTT u0;
    BlockTT v0;
    Vector spectrum;   ///< beta^k, k = 0..k0-1
};
PrescribedSvd prescribed_svd_matrix(int n, double beta, Index k0 = 25, Index rank = 5, std::uint64_t seed = 1);

}  // namespace ttsvd
