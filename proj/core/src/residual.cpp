#include <cmath>

#include "ttsvd/errors.hpp"
#include "ttsvd/solver.hpp"

namespace ttsvd {

double residual(const MatrixTT& a, const BlockTT& u, const BlockTT& v, const Vector& sigma, double round_delta) {
    const double sigma_norm = sigma.norm();
    if (!(sigma_norm > 0.0)) throw InvalidArgument("residual: Sigma must be nonzero");
    if (u.block_size() != sigma.size() || v.block_size() != sigma.size()) {
        throw ShapeError("residual: block sizes must match the number of singular values");
    }
    const int last = a.length() - 1;
    const BlockTT ul = u.block_position() == last ? u : move_block(u, last);
    const BlockTT vl = v.block_position() == last ? v : move_block(v, last);
    VectorTT atu = tt_round(block_as_vector(block_tt_matvec(matrix_tt_transpose(a), ul)), round_delta);
    VectorTT vs = block_as_vector(block_scale_columns(vl, -sigma));
    return tt_norm(tt_add(atu, vs)) / sigma_norm;
}

}  // namespace ttsvd
