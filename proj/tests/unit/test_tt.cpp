#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "oracle_util.hpp"
#include "ttsvd/errors.hpp"
#include "ttsvd/structured.hpp"
#include "ttsvd/tt.hpp"

using namespace ttsvd;
using testutil::random_tensor;
using testutil::rel_error;
using testutil::tt_dense;

namespace {

VectorTT raw_vector(const std::vector<Index>& modes, const std::vector<Index>& ranks, std::uint64_t seed) {
    std::vector<DenseTensor> cores;
    for (std::size_t n = 0; n < modes.size(); ++n) {
        cores.push_back(random_tensor({ranks[n], modes[n], ranks[n + 1]}, seed + n));
    }
    return VectorTT(std::move(cores));
}

MatrixTT raw_matrix(int n, Index rank, std::uint64_t seed, Index i = 2, Index j = 2) {
    std::vector<DenseTensor> cores;
    for (int c = 0; c < n; ++c) {
        const Index rl = c == 0 ? 1 : rank, rr = c == n - 1 ? 1 : rank;
        cores.push_back(random_tensor({rl, i, j, rr}, seed + static_cast<std::uint64_t>(c)));
    }
    return MatrixTT(std::move(cores));
}

BlockTT raw_block(int n, Index k, Index rank, int pos, std::uint64_t seed) {
    std::vector<DenseTensor> cores;
    for (int c = 0; c < n; ++c) {
        const Index rl = c == 0 ? 1 : rank, rr = c == n - 1 ? 1 : rank;
        cores.push_back(c == pos ? random_tensor({rl, k, 2, rr}, seed + static_cast<std::uint64_t>(c))
                                 : random_tensor({rl, 2, rr}, seed + static_cast<std::uint64_t>(c)));
    }
    return BlockTT(std::move(cores), pos);
}

std::vector<Index> twos(int n) { return std::vector<Index>(static_cast<std::size_t>(n), 2); }

std::vector<Index> interior_ranks(int n, Index r) {
    std::vector<Index> out(static_cast<std::size_t>(n) + 1, r);
    out.front() = out.back() = 1;
    return out;
}

// Ranks of the sequential unfoldings under the same truncation rule, computed
// with Eigen's SVD on dense data.
std::vector<Index> sequential_ranks(const Vector& t, const std::vector<Index>& shape, double delta) {
    std::vector<Index> ranks{1};
    Matrix c = Eigen::Map<const Matrix>(t.data(), 1, t.size());
    for (std::size_t n = 0; n + 1 < shape.size(); ++n) {
        const Index rows = ranks.back() * shape[n];
        Matrix m = Eigen::Map<const Matrix>(c.data(), rows, c.size() / rows);
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector s = svd.singularValues();
        Index r = s.size();
        for (Index q = 1; q <= s.size(); ++q) {
            if (s.tail(s.size() - q).squaredNorm() <= delta * delta * s.squaredNorm()) {
                r = q;
                break;
            }
        }
        ranks.push_back(r);
        c = s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    }
    ranks.push_back(1);
    return ranks;
}

}  // namespace

TEST(Formats, ValidateChains) {
    std::vector<DenseTensor> bad{random_tensor({1, 2, 3}, 1), random_tensor({2, 2, 1}, 2)};
    EXPECT_THROW(VectorTT{bad}, ShapeError);
    std::vector<DenseTensor> open{random_tensor({2, 2, 1}, 3)};
    EXPECT_THROW(VectorTT{open}, ShapeError);
    std::vector<DenseTensor> two_blocks{random_tensor({1, 3, 2, 2}, 4), random_tensor({2, 3, 2, 1}, 5)};
    EXPECT_THROW(BlockTT(two_blocks, 0), ShapeError);
}

TEST(Reconstruct, OnesAndSliceProducts) {
    std::vector<DenseTensor> ones;
    for (int n = 0; n < 4; ++n) ones.push_back(DenseTensor({1, 3, 1}, {1, 1, 1}));
    DenseTensor t = tt_reconstruct(VectorTT(ones));
    for (double v : t.values()) EXPECT_EQ(v, 1.0);

    VectorTT x = raw_vector(twos(5), interior_ranks(5, 3), 10);
    EXPECT_LT((vectorize(tt_reconstruct(x)) - tt_dense(x)).norm(), 1e-12 * tt_dense(x).norm());
    MatrixTT a = raw_matrix(3, 2, 20, 2, 3);
    EXPECT_LT(rel_error(tt_reconstruct(a), tt_dense(a)), 1e-13);
    BlockTT u = raw_block(4, 3, 2, 1, 30);
    EXPECT_LT(rel_error(tt_reconstruct(u), tt_dense(u)), 1e-13);
    EXPECT_THROW(tt_reconstruct(x, 8), BudgetError);
}

TEST(TtSvd, RankOneAndExact) {
    std::vector<DenseTensor> cores;
    for (int n = 0; n < 4; ++n) cores.push_back(random_tensor({1, 3, 1}, 40 + static_cast<std::uint64_t>(n)));
    VectorTT r1 = tt_svd_compress(tt_reconstruct(VectorTT(cores)), 0.0);
    EXPECT_EQ(r1.max_rank(), 1);

    DenseTensor t = random_tensor({2, 3, 2, 4}, 50);
    VectorTT x = tt_svd_compress(t, 0.0);
    EXPECT_LT((vectorize(tt_reconstruct(x)) - vectorize(t)).norm(), 1e-10 * t.norm());
    for (int n = 0; n + 1 < x.length(); ++n) EXPECT_TRUE(is_left_orthogonal(x.core(n)));
    EXPECT_THROW(tt_svd_compress(t, -1.0), InvalidArgument);
}

TEST(TtSvd, ErrorBoundAndSequentialRanks) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        // A smooth-plus-noise vector so truncation actually drops something.
        DenseTensor noise = random_tensor(twos(6), 60 + seed);
        Vector v(64);
        for (Index i = 0; i < 64; ++i) v(i) = std::sin(0.1 * static_cast<double>(i)) + 1e-3 * noise.data()[i];
        const double delta = 1e-3;
        DenseTensor t = tensorize(v, twos(6));
        VectorTT x = tt_svd_compress(t, delta);
        EXPECT_LE((vectorize(tt_reconstruct(x)) - v).norm(), delta * std::sqrt(5.0) * v.norm());
        EXPECT_EQ(x.ranks(), sequential_ranks(v, twos(6), delta));
    }
}

TEST(Orthogonalize, LeftAndRight) {
    VectorTT x = raw_vector({2, 3, 2, 2, 3}, {1, 2, 3, 3, 2, 1}, 70);
    const Vector ref = tt_dense(x);
    for (int p = 0; p < 5; ++p) {
        VectorTT l = left_orthogonalize(x, p);
        EXPECT_LT((tt_dense(l) - ref).norm(), 1e-12 * ref.norm());
        for (int n = 0; n < p; ++n) {
            EXPECT_TRUE(is_left_orthogonal(l.core(n)));
            EXPECT_EQ(l.tag(n), Orth::left);
        }
        VectorTT r = right_orthogonalize(x, p);
        EXPECT_LT((tt_dense(r) - ref).norm(), 1e-12 * ref.norm());
        for (int n = p + 1; n < 5; ++n) {
            EXPECT_TRUE(is_right_orthogonal(r.core(n)));
            EXPECT_EQ(r.tag(n), Orth::right);
        }
    }
    // Already orthogonal input keeps its value.
    VectorTT l = left_orthogonalize(x, 4);
    EXPECT_LT((tt_dense(left_orthogonalize(l, 4)) - ref).norm(), 1e-12 * ref.norm());
}

TEST(Orthogonalize, BlockCarriedAndMoved) {
    BlockTT u = raw_block(5, 3, 3, 1, 80);
    const Matrix ref = tt_dense(u);
    BlockTT l = left_orthogonalize(u, 4);
    EXPECT_EQ(l.block_position(), 4);
    EXPECT_LT(rel_error(tt_dense(l), ref), 1e-12);
    for (int p = 0; p < 5; ++p) {
        BlockTT m = move_block(l, p);
        EXPECT_EQ(m.block_position(), p);
        EXPECT_LT(rel_error(tt_dense(m), ref), 1e-12);
    }
    // With orthogonal frames, U^T U equals the block core's Gram matrix.
    BlockTT r = right_orthogonalize(left_orthogonalize(u, 2), 2);
    const DenseTensor local = block_core_to_local(r.core(2));
    Matrix c = local.as_matrix(local.size() / 3);
    Matrix full = tt_dense(r);
    EXPECT_LT((full.transpose() * full - c.transpose() * c).norm(), 1e-10 * (c.transpose() * c).norm());
}

TEST(Round, ExactAndMinimalRanks) {
    VectorTT x = raw_vector(twos(6), interior_ranks(6, 3), 90);
    const Vector ref = tt_dense(x);
    VectorTT r0 = tt_round(x, 0.0);
    EXPECT_LT((tt_dense(r0) - ref).norm(), 1e-12 * ref.norm());
    VectorTT xx = tt_add(x, x);
    EXPECT_EQ(xx.max_rank(), 6);
    EXPECT_EQ(tt_round(xx, 0.0).ranks(), r0.ranks());
    EXPECT_LE(r0.max_rank(), 3);
}

TEST(Round, ErrorBoundAndCap) {
    VectorTT x = raw_vector(twos(6), interior_ranks(6, 8), 100);
    const Vector ref = tt_dense(x);
    for (double delta : {1e-1, 1e-2, 1e-4}) {
        VectorTT r = tt_round(x, delta);
        EXPECT_LE((tt_dense(r) - ref).norm(), delta * std::sqrt(5.0) * ref.norm() * (1 + 1e-10));
        for (std::size_t b = 0; b < r.ranks().size(); ++b) EXPECT_LE(r.ranks()[b], x.ranks()[b]);
    }
    EXPECT_LE(tt_round(x, 0.0, 2).max_rank(), 2);
}

TEST(Arithmetic, AddScaleInner) {
    VectorTT x = raw_vector(twos(5), interior_ranks(5, 2), 110);
    VectorTT y = raw_vector(twos(5), interior_ranks(5, 3), 120);
    const Vector xd = tt_dense(x), yd = tt_dense(y);
    VectorTT s = tt_add(x, y);
    EXPECT_EQ(s.ranks(), (std::vector<Index>{1, 5, 5, 5, 5, 1}));
    EXPECT_LT((tt_dense(s) - (xd + yd)).norm(), 1e-12 * (xd + yd).norm());
    EXPECT_LT(tt_dense(tt_add(x, tt_scale(x, -1.0))).norm(), 1e-12 * xd.norm());
    EXPECT_LT((tt_dense(tt_add(x, tt_scale(y, 0.0))) - xd).norm(), 1e-14 * xd.norm());
    EXPECT_NEAR(tt_inner(x, y), xd.dot(yd), 1e-10 * xd.norm() * yd.norm());
    EXPECT_GE(tt_inner(x, x), 0.0);
    EXPECT_NEAR(tt_norm(x), xd.norm(), 1e-12 * xd.norm());
    VectorTT l = left_orthogonalize(x, 4);
    EXPECT_NEAR(tt_inner(l, l), l.core(4).norm() * l.core(4).norm(), 1e-10 * xd.squaredNorm());
    EXPECT_THROW(tt_add(x, raw_vector(twos(4), interior_ranks(4, 2), 1)), ShapeError);
}

TEST(Arithmetic, Matvec) {
    MatrixTT a = raw_matrix(5, 3, 130);
    VectorTT x = raw_vector(twos(5), interior_ranks(5, 3), 140);
    VectorTT y = matvec_tt(a, x);
    EXPECT_EQ(y.ranks(), (std::vector<Index>{1, 9, 9, 9, 9, 1}));
    const Vector ref = tt_dense(a) * tt_dense(x);
    EXPECT_LT((tt_dense(y) - ref).norm(), 1e-10 * ref.norm());
    EXPECT_LT((tt_dense(matvec_tt(identity_tt(5), x)) - tt_dense(x)).norm(), 1e-14 * ref.norm());
    EXPECT_EQ(tt_dense(matvec_tt(a, tt_scale(x, 0.0))).norm(), 0.0);
    EXPECT_THROW(matvec_tt(raw_matrix(5, 2, 1, 2, 3), x), ShapeError);
}

TEST(Arithmetic, BlockMatvecAndColumns) {
    MatrixTT a = raw_matrix(4, 2, 150);
    BlockTT u = raw_block(4, 3, 2, 3, 160);
    BlockTT au = block_tt_matvec(a, u);
    EXPECT_LT(rel_error(tt_dense(au), tt_dense(a) * tt_dense(u)), 1e-12);
    const Matrix ud = tt_dense(u);
    for (Index k = 0; k < 3; ++k) EXPECT_LT((tt_dense(block_column(u, k)) - ud.col(k)).norm(), 1e-13 * ud.norm());
    Vector s(3);
    s << 2, -1, 0.5;
    EXPECT_LT(rel_error(tt_dense(block_scale_columns(u, s)), ud * s.asDiagonal()), 1e-14);
    VectorTT flat = block_as_vector(u);
    EXPECT_EQ(flat.mode_sizes().back(), 6);
    EXPECT_LT(rel_error(tt_dense(vector_as_block(flat, 3)), ud), 1e-14);
}

TEST(MatrixOps, TransposeDiagAddMultiply) {
    MatrixTT a = raw_matrix(4, 2, 170, 2, 3);
    const Matrix ad = tt_dense(a);
    EXPECT_LT(rel_error(tt_dense(matrix_tt_transpose(a)), ad.transpose()), 1e-15);
    EXPECT_LT(rel_error(tt_dense(matrix_tt_transpose(matrix_tt_transpose(a))), ad), 1e-15);

    std::vector<DenseTensor> ones;
    for (int n = 0; n < 4; ++n) ones.push_back(DenseTensor({1, 2, 1}, {1, 1}));
    EXPECT_LT(rel_error(tt_dense(diag_embed(VectorTT(ones))), Matrix::Identity(16, 16)), 1e-15);
    std::vector<DenseTensor> e1;
    for (int n = 0; n < 4; ++n) e1.push_back(DenseTensor({1, 2, 1}, {1, 0}));
    Matrix d = tt_dense(diag_embed(VectorTT(e1)));
    EXPECT_EQ(d(0, 0), 1.0);
    EXPECT_EQ(d.norm(), 1.0);
    VectorTT x = raw_vector(twos(4), interior_ranks(4, 3), 180);
    MatrixTT dx = diag_embed(x);
    EXPECT_EQ(dx.ranks(), x.ranks());
    EXPECT_LT(rel_error(tt_dense(dx), Matrix(tt_dense(x).asDiagonal())), 1e-14);

    MatrixTT b = raw_matrix(4, 3, 190, 2, 3);
    EXPECT_LT(rel_error(tt_dense(matrix_tt_add(a, b)), ad + tt_dense(b)), 1e-14);
    EXPECT_LT(rel_error(tt_dense(matrix_tt_scale(a, -2.0)), -2.0 * ad), 1e-15);
    MatrixTT c = raw_matrix(4, 2, 200, 3, 2);
    EXPECT_LT(rel_error(tt_dense(matrix_tt_multiply(a, c)), ad * tt_dense(c)), 1e-12);
    MatrixTT sum = matrix_tt_add(a, a);
    MatrixTT rounded = matrix_tt_round(sum, 1e-14);
    EXPECT_LE(rounded.max_rank(), a.max_rank());
    EXPECT_LT(rel_error(tt_dense(rounded), 2.0 * ad), 1e-12);
}

TEST(MatrixOps, FromDense) {
    Matrix m = testutil::random_matrix(8, 4, 210);
    MatrixTT a = matrix_tt_from_dense(m, {2, 2, 2}, {2, 2, 1}, 0.0);
    EXPECT_LT(rel_error(tt_dense(a), m), 1e-12);
}

TEST(BlockPlumbing, MergeSplitPreservesValue) {
    BlockTT u = left_orthogonalize(raw_block(5, 3, 3, 4, 220), 4);
    u = move_block(u, 2);
    const Matrix ref = tt_dense(u);
    const int n = 3;  // merge cores 2 and 3
    DenseTensor merged = merge_cores(u, n);
    ASSERT_EQ(merged.order(), 5);
    EXPECT_EQ(merged.extent(4), 3);
    EXPECT_EQ(merged.extent(0), u.ranks()[2]);
    EXPECT_EQ(merged.extent(3), u.ranks()[4]);
    for (SplitDirection dir : {SplitDirection::left, SplitDirection::right}) {
        SplitResult s = split_block_core(merged, dir, 0.0);
        std::vector<DenseTensor> cores = u.cores();
        cores[2] = s.first;
        cores[3] = s.second;
        const int pos = dir == SplitDirection::left ? 2 : 3;
        BlockTT v(cores, pos);
        EXPECT_LT(rel_error(tt_dense(v), ref), 1e-12);
        if (dir == SplitDirection::left) {
            EXPECT_TRUE(is_right_orthogonal(s.second));
        } else {
            EXPECT_TRUE(is_left_orthogonal(s.first));
        }
    }
    EXPECT_THROW(merge_cores(u, 1), InvalidArgument);
}

TEST(BlockPlumbing, AlsSplitAndAbsorb) {
    BlockTT u = left_orthogonalize(raw_block(4, 2, 2, 3, 230), 3);
    u = move_block(u, 2);
    const Matrix ref = tt_dense(u);
    DenseTensor local = block_core_to_local(u.core(2));
    EXPECT_EQ(local_to_block_core(local), u.core(2));
    // Move left: carrier into core 1.
    SplitResult l = split_block_core(local, SplitDirection::left, 0.0);
    std::vector<DenseTensor> cores = u.cores();
    cores[1] = absorb_carrier(l.first, cores[1], SplitDirection::left);
    cores[2] = l.second;
    EXPECT_LT(rel_error(tt_dense(BlockTT(cores, 1)), ref), 1e-12);
    // Move right: carrier into core 3.
    SplitResult r = split_block_core(local, SplitDirection::right, 0.0);
    cores = u.cores();
    cores[2] = r.first;
    cores[3] = absorb_carrier(r.second, cores[3], SplitDirection::right);
    EXPECT_LT(rel_error(tt_dense(BlockTT(cores, 3)), ref), 1e-12);
}
