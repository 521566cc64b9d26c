#pragma once

#include <cstdint>

#include "ttsvd/dense.hpp"

namespace ttsvd::oracle {

// Dense matrices built entry by entry from their index rules (0-based), with
// no use of the TT machinery. `s` is a plain vector.

Matrix upper_toeplitz(const Vector& s);         ///< T(i, j) = s(j - i - 1), j > i
Matrix upper_antihankel(const Vector& s);       ///< H(i, j) = s(M - 2 - i - j), i + j <= M - 2
Matrix full_toeplitz(const Vector& x);          ///< A(i, j) = x(M - 1 + i - j), x of length 2M
Matrix shift(Index m);                          ///< ones at (i, i + 1)
/// (i + 1, i) = a(i), (i, i) = b(i), (i, i + 1) = c(i + 1).
Matrix tridiagonal(const Vector& a, const Vector& b, const Vector& c);
Matrix hilbert(Index rows, Index cols);         ///< 1 / (i + j + 1)

/// ||A^T U - V diag(s)||_F / ||s||.
double residual(const Matrix& a, const Matrix& u, const Matrix& v, const Vector& s);

/// Singular values by power iteration with deflation on A^T A; independent of
/// any library SVD.
Vector power_singular_values(const Matrix& a, Index k, int iterations = 20000);

Matrix random_normal(Index rows, Index cols, std::uint64_t seed);

}  // namespace ttsvd::oracle
