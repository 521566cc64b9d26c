#include <algorithm>
#include <string>

#include "ttsvd/contract.hpp"
#include "ttsvd/errors.hpp"
#include "ttsvd/tt.hpp"

namespace ttsvd {

namespace {

// Direct sum of two cores viewed as (R_l, M, R_r): block diagonal in the
// bonds, except that the first core concatenates along R_r only and the last
// along R_l only.
DenseTensor direct_sum(const DenseTensor& a, const DenseTensor& b, bool first, bool last) {
    const int order = a.order();
    std::vector<Index> inner_shape(a.shape().begin() + 1, a.shape().end() - 1);
    const Index m = product(inner_shape);
    const Index al = a.extent(0), ar = a.extent(order - 1);
    const Index bl = b.extent(0), br = b.extent(order - 1);
    const Index rl = first ? 1 : al + bl;
    const Index rr = last ? 1 : ar + br;
    std::vector<Index> shape{rl};
    shape.insert(shape.end(), inner_shape.begin(), inner_shape.end());
    shape.push_back(rr);
    DenseTensor out(shape);
    const Index a_off_l = 0, a_off_r = 0;
    const Index b_off_l = first ? 0 : al;
    const Index b_off_r = last ? 0 : ar;
    for (Index r = 0; r < ar; ++r)
        for (Index i = 0; i < m; ++i)
            for (Index l = 0; l < al; ++l)
                out.data()[(l + a_off_l) + rl * (i + m * (r + a_off_r))] += a.data()[l + al * (i + m * r)];
    for (Index r = 0; r < br; ++r)
        for (Index i = 0; i < m; ++i)
            for (Index l = 0; l < bl; ++l)
                out.data()[(l + b_off_l) + rl * (i + m * (r + b_off_r))] += b.data()[l + bl * (i + m * r)];
    return out;
}

template <class Chain>
std::vector<DenseTensor> sum_cores(const Chain& x, const Chain& y) {
    const int n_cores = x.length();
    std::vector<DenseTensor> cores;
    for (int n = 0; n < n_cores; ++n) {
        const DenseTensor& a = x.core(n);
        const DenseTensor& b = y.core(n);
        if (a.order() != b.order() ||
            !std::equal(a.shape().begin() + 1, a.shape().end() - 1, b.shape().begin() + 1)) {
            throw ShapeError("addition: mode sizes differ at core " + std::to_string(n));
        }
        if (n_cores == 1) {
            DenseTensor s = a;
            s += b;
            cores.push_back(std::move(s));
        } else {
            cores.push_back(direct_sum(a, b, n == 0, n == n_cores - 1));
        }
    }
    return cores;
}

VectorTT as_vector_chain(const MatrixTT& a) {
    std::vector<DenseTensor> cores;
    for (const DenseTensor& c : a.cores()) {
        cores.push_back(c.reshaped({c.extent(0), c.extent(1) * c.extent(2), c.extent(3)}));
    }
    return VectorTT(std::move(cores));
}

}  // namespace

VectorTT tt_round(const VectorTT& x, double delta, Index max_rank) {
    if (!(delta >= 0.0)) throw InvalidArgument("tt_round: delta must be nonnegative");
    const int n_cores = x.length();
    if (n_cores == 1) return x;
    VectorTT y = right_orthogonalize(x, 0);
    std::vector<Orth> tags = y.tags();
    std::vector<DenseTensor> cores = std::move(y).release();
    TruncationOptions opts;
    opts.max_rank = max_rank;
    opts.drop_numerical_zeros = true;
    for (int n = 0; n + 1 < n_cores; ++n) {
        auto nu = static_cast<std::size_t>(n);
        DenseTensor& c = cores[nu];
        const Index rl = c.extent(0), in = c.extent(1), rr = c.extent(2);
        SvdFactors f = truncated_svd(c.as_matrix(rl * in), delta, opts);
        const Index r = f.rank();
        c = tensorize(Eigen::Map<const Vector>(f.u.data(), f.u.size()), {rl, in, r});
        Matrix sv = f.s.asDiagonal() * f.v.transpose();
        DenseTensor& next = cores[nu + 1];
        Matrix prod = gemm(sv, next.as_matrix(rr));
        next = tensorize(Eigen::Map<const Vector>(prod.data(), prod.size()), {r, next.extent(1), next.extent(2)});
        tags[nu] = Orth::left;
        tags[nu + 1] = Orth::none;
    }
    return VectorTT(std::move(cores), std::move(tags));
}

VectorTT tt_add(const VectorTT& x, const VectorTT& y) {
    if (x.length() != y.length()) throw ShapeError("tt_add: chains differ in length");
    return VectorTT(sum_cores(x, y));
}

VectorTT tt_scale(const VectorTT& x, double alpha) {
    std::vector<DenseTensor> cores = x.cores();
    std::vector<Orth> tags = x.tags();
    // Scale a core that carries no orthogonality claim when there is one.
    int target = x.length() - 1;
    for (int n = 0; n < x.length(); ++n) {
        if (tags[static_cast<std::size_t>(n)] == Orth::none) {
            target = n;
            break;
        }
    }
    cores[static_cast<std::size_t>(target)] *= alpha;
    tags[static_cast<std::size_t>(target)] = Orth::none;
    return VectorTT(std::move(cores), std::move(tags));
}

double tt_inner(const VectorTT& x, const VectorTT& y) {
    if (x.length() != y.length() || x.mode_sizes() != y.mode_sizes()) {
        throw ShapeError("tt_inner: mode sizes differ");
    }
    DenseTensor e({1, 1}, {1.0});
    for (int n = 0; n < x.length(); ++n) {
        DenseTensor t = contract(e, {0}, x.core(n), {0});
        e = contract(t, {0, 1}, y.core(n), {0, 1});
    }
    return e.data()[0];
}

double tt_norm(const VectorTT& x) {
    VectorTT y = left_orthogonalize(x, x.length() - 1);
    return y.core(x.length() - 1).norm();
}

VectorTT matvec_tt(const MatrixTT& a, const VectorTT& x) {
    if (a.length() != x.length() || a.col_sizes() != x.mode_sizes()) {
        throw ShapeError("matvec_tt: matrix column modes do not match the vector modes");
    }
    std::vector<DenseTensor> cores;
    for (int n = 0; n < a.length(); ++n) {
        const DenseTensor& c = a.core(n);
        const DenseTensor& v = x.core(n);
        DenseTensor t = contract(c, {2}, v, {1}).permuted({0, 3, 1, 2, 4});
        cores.push_back(std::move(t).reshaped({c.extent(0) * v.extent(0), c.extent(1), c.extent(3) * v.extent(2)}));
    }
    return VectorTT(std::move(cores));
}

BlockTT block_tt_matvec(const MatrixTT& a, const BlockTT& u) {
    if (a.length() != u.length() || a.col_sizes() != u.mode_sizes()) {
        throw ShapeError("block_tt_matvec: matrix column modes do not match the block modes");
    }
    std::vector<DenseTensor> cores;
    for (int n = 0; n < a.length(); ++n) {
        const DenseTensor& c = a.core(n);
        const DenseTensor& v = u.core(n);
        if (n == u.block_position()) {
            DenseTensor t = contract(c, {2}, v, {2}).permuted({0, 3, 4, 1, 2, 5});
            cores.push_back(std::move(t).reshaped(
                {c.extent(0) * v.extent(0), v.extent(1), c.extent(1), c.extent(3) * v.extent(3)}));
        } else {
            DenseTensor t = contract(c, {2}, v, {1}).permuted({0, 3, 1, 2, 4});
            cores.push_back(
                std::move(t).reshaped({c.extent(0) * v.extent(0), c.extent(1), c.extent(3) * v.extent(2)}));
        }
    }
    return BlockTT(std::move(cores), u.block_position());
}

MatrixTT matrix_tt_transpose(const MatrixTT& a) {
    std::vector<DenseTensor> cores;
    for (const DenseTensor& c : a.cores()) cores.push_back(c.permuted({0, 2, 1, 3}));
    return MatrixTT(std::move(cores));
}

MatrixTT diag_embed(const VectorTT& x) {
    std::vector<DenseTensor> cores;
    for (const DenseTensor& c : x.cores()) {
        const Index rl = c.extent(0), in = c.extent(1), rr = c.extent(2);
        DenseTensor d({rl, in, in, rr});
        for (Index b = 0; b < rr; ++b)
            for (Index i = 0; i < in; ++i)
                for (Index a = 0; a < rl; ++a) d({a, i, i, b}) = c({a, i, b});
        cores.push_back(std::move(d));
    }
    return MatrixTT(std::move(cores));
}

MatrixTT matrix_tt_add(const MatrixTT& a, const MatrixTT& b) {
    if (a.length() != b.length()) throw ShapeError("matrix_tt_add: chains differ in length");
    return MatrixTT(sum_cores(a, b));
}

MatrixTT matrix_tt_scale(const MatrixTT& a, double alpha) {
    std::vector<DenseTensor> cores = a.cores();
    cores.back() *= alpha;
    return MatrixTT(std::move(cores));
}

MatrixTT matrix_tt_multiply(const MatrixTT& a, const MatrixTT& b) {
    if (a.length() != b.length() || a.col_sizes() != b.row_sizes()) {
        throw ShapeError("matrix_tt_multiply: inner mode sizes differ");
    }
    std::vector<DenseTensor> cores;
    for (int n = 0; n < a.length(); ++n) {
        const DenseTensor& p = a.core(n);
        const DenseTensor& q = b.core(n);
        DenseTensor t = contract(p, {2}, q, {1}).permuted({0, 3, 1, 4, 2, 5});
        cores.push_back(std::move(t).reshaped(
            {p.extent(0) * q.extent(0), p.extent(1), q.extent(2), p.extent(3) * q.extent(3)}));
    }
    return MatrixTT(std::move(cores));
}

MatrixTT matrix_tt_round(const MatrixTT& a, double delta, Index max_rank) {
    VectorTT r = tt_round(as_vector_chain(a), delta, max_rank);
    std::vector<DenseTensor> cores = std::move(r).release();
    for (int n = 0; n < a.length(); ++n) {
        DenseTensor& c = cores[static_cast<std::size_t>(n)];
        c = std::move(c).reshaped({c.extent(0), a.core(n).extent(1), a.core(n).extent(2), c.extent(2)});
    }
    return MatrixTT(std::move(cores));
}

// ---- block TT plumbing ----

VectorTT block_as_vector(const BlockTT& u) {
    const int last = u.length() - 1;
    if (u.block_position() != last) throw InvalidArgument("block_as_vector: block must sit at the last core");
    std::vector<DenseTensor> cores = u.cores();
    DenseTensor& c = cores.back();
    c = std::move(c).reshaped({c.extent(0), c.extent(1) * c.extent(2), 1});
    return VectorTT(std::move(cores), u.tags());
}

BlockTT vector_as_block(const VectorTT& x, Index k) {
    std::vector<DenseTensor> cores = x.cores();
    DenseTensor& c = cores.back();
    if (k <= 0 || c.extent(1) % k != 0) throw ShapeError("vector_as_block: last mode not divisible by K");
    c = std::move(c).reshaped({c.extent(0), k, c.extent(1) / k, 1});
    return BlockTT(std::move(cores), x.length() - 1, x.tags());
}

VectorTT block_column(const BlockTT& u, Index k) {
    if (k < 0 || k >= u.block_size()) throw InvalidArgument("block_column: column index out of range");
    std::vector<DenseTensor> cores = u.cores();
    const DenseTensor& b = u.core(u.block_position());
    const Index rl = b.extent(0), kk = b.extent(1), in = b.extent(2), rr = b.extent(3);
    DenseTensor col({rl, in, rr});
    for (Index r = 0; r < rr; ++r)
        for (Index i = 0; i < in; ++i)
            for (Index l = 0; l < rl; ++l) col({l, i, r}) = b.data()[l + rl * (k + kk * (i + in * r))];
    cores[static_cast<std::size_t>(u.block_position())] = std::move(col);
    return VectorTT(std::move(cores));
}

BlockTT block_scale_columns(const BlockTT& u, const Vector& s) {
    if (s.size() != u.block_size()) throw ShapeError("block_scale_columns: one scale per column required");
    std::vector<DenseTensor> cores = u.cores();
    std::vector<Orth> tags = u.tags();
    const auto bp = static_cast<std::size_t>(u.block_position());
    DenseTensor& b = cores[bp];
    const Index rl = b.extent(0), kk = b.extent(1);
    const Index rest = b.size() / (rl * kk);
    for (Index j = 0; j < rest; ++j)
        for (Index k = 0; k < kk; ++k)
            for (Index l = 0; l < rl; ++l) b.data()[l + rl * (k + kk * j)] *= s[k];
    tags[bp] = Orth::none;
    return BlockTT(std::move(cores), u.block_position(), std::move(tags));
}

DenseTensor merge_cores(const BlockTT& x, int n) {
    if (n < 1 || n >= x.length()) throw InvalidArgument("merge_cores: position must lie in [1, N)");
    if (x.block_position() == n) {
        return contract_last_first(x.core(n - 1), x.core(n)).permuted({0, 1, 3, 4, 2});
    }
    if (x.block_position() == n - 1) {
        return contract_last_first(x.core(n - 1), x.core(n)).permuted({0, 2, 3, 4, 1});
    }
    throw InvalidArgument("merge_cores: the block must sit at one of the merged positions");
}

SplitResult split_block_core(const DenseTensor& local, SplitDirection direction, double delta,
                             const TruncationOptions& opts) {
    if (!(delta >= 0.0)) throw InvalidArgument("split_block_core: delta must be nonnegative");
    SplitResult out;
    auto as_tensor = [](const Matrix& m, std::vector<Index> shape) {
        return tensorize(Eigen::Map<const Vector>(m.data(), m.size()), std::move(shape));
    };
    if (local.order() == 4) {
        const Index rl = local.extent(0), in = local.extent(1), rr = local.extent(2), k = local.extent(3);
        if (direction == SplitDirection::left) {
            SvdFactors f = truncated_svd(matricize(local, {0, 3}), delta, opts);
            const Index r = f.rank();
            Matrix us = f.u * f.s.asDiagonal();
            Matrix vt = f.v.transpose();
            out.first = as_tensor(us, {rl, k, r});
            out.second = as_tensor(vt, {r, in, rr});
            out.rank = r;
            out.discarded_energy = f.discarded_energy;
        } else {
            SvdFactors f = truncated_svd(local.as_matrix(rl * in), delta, opts);
            const Index r = f.rank();
            Matrix svt = f.s.asDiagonal() * f.v.transpose();
            out.first = as_tensor(f.u, {rl, in, r});
            out.second = as_tensor(svt, {r, rr, k}).permuted({0, 2, 1});
            out.rank = r;
            out.discarded_energy = f.discarded_energy;
        }
        return out;
    }
    if (local.order() == 5) {
        const Index rl = local.extent(0), i1 = local.extent(1), i2 = local.extent(2), rr = local.extent(3),
                    k = local.extent(4);
        if (direction == SplitDirection::left) {
            SvdFactors f = truncated_svd(matricize(local, {0, 1, 4}), delta, opts);
            const Index r = f.rank();
            Matrix us = f.u * f.s.asDiagonal();
            Matrix vt = f.v.transpose();
            out.first = as_tensor(us, {rl, i1, k, r}).permuted({0, 2, 1, 3});
            out.second = as_tensor(vt, {r, i2, rr});
            out.rank = r;
            out.discarded_energy = f.discarded_energy;
        } else {
            SvdFactors f = truncated_svd(local.as_matrix(rl * i1), delta, opts);
            const Index r = f.rank();
            Matrix svt = f.s.asDiagonal() * f.v.transpose();
            out.first = as_tensor(f.u, {rl, i1, r});
            out.second = as_tensor(svt, {r, i2, rr, k}).permuted({0, 3, 1, 2});
            out.rank = r;
            out.discarded_energy = f.discarded_energy;
        }
        return out;
    }
    throw ShapeError("split_block_core: local tensor must be 4th or 5th order");
}

DenseTensor absorb_carrier(const DenseTensor& carrier, const DenseTensor& neighbour, SplitDirection direction) {
    if (carrier.order() != 3 || neighbour.order() != 3) throw ShapeError("absorb_carrier: expects 3rd-order inputs");
    if (direction == SplitDirection::left) {
        return contract_last_first(neighbour, carrier).permuted({0, 2, 1, 3});
    }
    return contract_last_first(carrier, neighbour);
}

DenseTensor block_core_to_local(const DenseTensor& block_core) {
    if (block_core.order() != 4) throw ShapeError("block core must be 4th-order");
    return block_core.permuted({0, 2, 3, 1});
}

DenseTensor local_to_block_core(const DenseTensor& local) {
    if (local.order() != 4) throw ShapeError("local block tensor must be 4th-order");
    return local.permuted({0, 3, 1, 2});
}

}  // namespace ttsvd
