#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

#include "oracle_util.hpp"
#include "ttsvd/local_solver.hpp"

using namespace ttsvd;
using testutil::random_matrix;

namespace {

BlockOperator mul(const Matrix& a) {
    return [a](const Matrix& y) { return Matrix(a * y); };
}

LocalSvd solve(const Matrix& a, Index k, bool matrix_free, std::uint64_t seed = 1) {
    LocalSolverOptions o;
    o.seed = seed;
    if (matrix_free) o.dense_crossover = 0;
    return local_block_svd(mul(a), mul(a.transpose()), a.rows(), a.cols(), k, o);
}

}  // namespace

TEST(LocalSvd, DiagonalCase) {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 3;
    a(1, 1) = 2;
    a(2, 2) = 1;
    for (bool mf : {false, true}) {
        LocalSvd s = solve(a, 2, mf);
        EXPECT_NEAR(s.s(0), 3.0, 1e-12);
        EXPECT_NEAR(s.s(1), 2.0, 1e-12);
        EXPECT_NEAR(s.u(0, 0), 1.0, 1e-10);
        EXPECT_NEAR(s.u(1, 1), 1.0, 1e-10);
        EXPECT_NEAR(s.v(0, 0), 1.0, 1e-10);
        EXPECT_NEAR(s.v(1, 1), 1.0, 1e-10);
    }
}

TEST(LocalSvd, BlockMatrixSpectrum) {
    // Eigenvalues of [[0, A], [A^T, 0]] are +-sigma plus P - Q zeros.
    Matrix a = random_matrix(8, 6, 2);
    Matrix b = Matrix::Zero(14, 14);
    b.topRightCorner(8, 6) = a;
    b.bottomLeftCorner(6, 8) = a.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(b);
    Vector s = Eigen::JacobiSVD<Matrix>(a).singularValues();
    std::vector<double> expected;
    for (Index k = 0; k < 6; ++k) {
        expected.push_back(s(k));
        expected.push_back(-s(k));
    }
    expected.push_back(0.0);
    expected.push_back(0.0);
    std::sort(expected.begin(), expected.end());
    for (Index k = 0; k < 14; ++k) EXPECT_NEAR(es.eigenvalues()(k), expected[static_cast<std::size_t>(k)], 1e-12);
}

TEST(LocalSvd, MatrixFreeMatchesDense) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Matrix a = random_matrix(60 + static_cast<Index>(seed), 45, 10 + seed);
        const Vector ref = Eigen::JacobiSVD<Matrix>(a).singularValues();
        for (bool mf : {false, true}) {
            LocalSvd s = solve(a, 5, mf, seed);
            EXPECT_EQ(s.dense, !mf);
            EXPECT_TRUE(s.converged);
            EXPECT_LE((s.s - ref.head(5)).cwiseAbs().maxCoeff(), 1e-9);
            EXPECT_LT((s.u.transpose() * s.u - Matrix::Identity(5, 5)).norm(), 1e-10);
            EXPECT_LT((s.v.transpose() * s.v - Matrix::Identity(5, 5)).norm(), 1e-10);
            EXPECT_LT((a * s.v - s.u * s.s.asDiagonal()).norm(), 1e-8 * ref(0));
            for (Index c = 0; c < 5; ++c) {
                Index arg = 0;
                s.u.col(c).cwiseAbs().maxCoeff(&arg);
                EXPECT_GT(s.u(arg, c), 0.0);
            }
        }
    }
}

TEST(LocalSvd, ClusteredSpectrum) {
    // Repeated singular values: the values must still be exact.
    Matrix q1 = Eigen::HouseholderQR<Matrix>(random_matrix(50, 50, 20)).householderQ();
    Matrix q2 = Eigen::HouseholderQR<Matrix>(random_matrix(40, 40, 21)).householderQ();
    Vector s = Vector::LinSpaced(40, 1.0, 0.1);
    s.head(4).setConstant(2.0);
    Matrix a = q1.leftCols(40) * s.asDiagonal() * q2.transpose();
    LocalSvd r = solve(a, 3, true);
    EXPECT_LE((r.s - Vector::Constant(3, 2.0)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LocalSvd, WarmStart) {
    Matrix a = random_matrix(70, 50, 30);
    LocalSvd first = solve(a, 4, true);
    LocalSolverOptions o;
    o.dense_crossover = 0;
    LocalSvd again = local_block_svd(mul(a), mul(a.transpose()), 70, 50, 4, o, &first.u, &first.v);
    EXPECT_LE(again.iterations, first.iterations);
    EXPECT_LE((again.s - first.s).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LocalEig, MatchesDense) {
    Matrix g = random_matrix(80, 80, 40);
    g = (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    LocalSolverOptions o;
    o.dense_crossover = 0;
    LocalEig e = local_symmetric_eig(mul(g), 80, 4, o);
    for (Index k = 0; k < 4; ++k) EXPECT_NEAR(e.values(k), es.eigenvalues()(79 - k), 1e-9);
    EXPECT_LT((g * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 1e-7);
}

TEST(FixSigns, LargestEntryPositive) {
    Matrix a(3, 2);
    a << 0.1, 0.5, -0.9, 0.2, 0.3, -0.7;
    Matrix b = Matrix::Ones(2, 2);
    fix_signs(a, &b);
    EXPECT_GT(a(1, 0), 0.0);
    EXPECT_GT(a(2, 1), 0.0);
    EXPECT_EQ(b(0, 0), -1.0);
    EXPECT_EQ(b(0, 1), -1.0);
}
