#pragma once

#include <cstdint>
#include <vector>

#include "ttsvd/tt.hpp"

// Brute-force helpers shared by the unit tests. None of them calls the
// library's reshaping or contraction routines.
namespace testutil {

using ttsvd::DenseTensor;
using ttsvd::Index;
using ttsvd::Matrix;
using ttsvd::Vector;

DenseTensor random_tensor(std::vector<Index> shape, std::uint64_t seed);
Matrix random_matrix(Index rows, Index cols, std::uint64_t seed);

/// Multi-index of a linear position under the column-major rule.
std::vector<Index> unravel(Index linear, const std::vector<Index>& shape);
/// Entry read through the flat data array with an explicitly computed offset.
double entry(const DenseTensor& t, const std::vector<Index>& idx);

/// Entry (i_1..i_N) of a vector TT as a product of slice matrices.
double tt_entry(const ttsvd::VectorTT& x, const std::vector<Index>& idx);
/// Full vector by slice products over every multi-index.
Vector tt_dense(const ttsvd::VectorTT& x);
/// Dense matrix of a matrix TT by slice products.
Matrix tt_dense(const ttsvd::MatrixTT& a);
/// Dense (prod I) x K matrix of a block TT by slice products.
Matrix tt_dense(const ttsvd::BlockTT& u);

double rel_error(const Matrix& a, const Matrix& b);

}  // namespace testutil
