#pragma once

#include <vector>

#include "ttsvd/tt.hpp"

namespace ttsvd {

/// Cached contractions of the U^T A V network. left[p] contracts cores [0, p)
/// and right[p] contracts cores (p, N); both have shape (R^U, R^A, R^V) at the
/// corresponding bond. left[0] and right[N-1] are the 1x1x1 boundary.
struct Environment {
    std::vector<DenseTensor> left;
    std::vector<DenseTensor> right;
};

DenseTensor env_boundary();

/// left[p+1] from left[p] and the cores at p, contracted in the order L, V, A, U.
DenseTensor env_left_step(const DenseTensor& left, const DenseTensor& u, const DenseTensor& a, const DenseTensor& v);
/// right[p-1] from right[p] and the cores at p, contracted in the order R, V, A, U.
DenseTensor env_right_step(const DenseTensor& right, const DenseTensor& u, const DenseTensor& a,
                           const DenseTensor& v);

/// Left environments for every position; u and v carry their block at N-1 and
/// their leading cores are left-orthogonal.
Environment env_init(const BlockTT& u, const MatrixTT& a, const BlockTT& v);

/// Local ALS product: y (R^V_l, J, R^V_r, K) -> (R^U_l, I, R^U_r, K), the
/// projected matrix applied to K columns. Contraction order L, Y, A, R.
DenseTensor als_apply(const DenseTensor& left, const DenseTensor& a, const DenseTensor& right, const DenseTensor& y);
/// Transposed map: x (R^U_l, I, R^U_r, K) -> (R^V_l, J, R^V_r, K).
DenseTensor als_apply_transpose(const DenseTensor& left, const DenseTensor& a, const DenseTensor& right,
                                const DenseTensor& x);

/// Local MALS product on two merged cores: y (R^V_l, J_1, J_2, R^V_r, K) ->
/// (R^U_l, I_1, I_2, R^U_r, K). Contraction order L, Y, A_1, A_2, R.
DenseTensor mals_apply(const DenseTensor& left, const DenseTensor& a1, const DenseTensor& a2,
                       const DenseTensor& right, const DenseTensor& y);
DenseTensor mals_apply_transpose(const DenseTensor& left, const DenseTensor& a1, const DenseTensor& a2,
                                 const DenseTensor& right, const DenseTensor& x);

}  // namespace ttsvd
