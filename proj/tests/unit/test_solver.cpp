#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "harness/oracles.hpp"
#include "oracle_util.hpp"
#include "ttsvd/errors.hpp"
#include "ttsvd/report_json.hpp"
#include "ttsvd/solver.hpp"
#include "ttsvd/structured.hpp"

#include <json.hpp>

using namespace ttsvd;
using testutil::tt_dense;

namespace {

Vector dense_sigma(const MatrixTT& a, Index k) {
    return Eigen::BDCSVD<Matrix>(tt_dense(a)).singularValues().head(k);
}

SolverConfig config(Index k, double eps = 1e-9, std::uint64_t seed = 1) {
    SolverConfig c;
    c.k = k;
    c.epsilon = eps;
    c.seed = seed;
    return c;
}

double orth_error(const BlockTT& u) {
    const Matrix d = tt_dense(u);
    return (d.transpose() * d - Matrix::Identity(d.cols(), d.cols())).norm();
}

}  // namespace

TEST(InitBlock, MinimalRanks) {
    BlockTT u = init_block_tt(std::vector<Index>(10, 2), 10, 1);
    const std::vector<Index> r = u.ranks();
    EXPECT_EQ(r[9], 5);
    EXPECT_EQ(r[8], 3);
    EXPECT_EQ(r[7], 2);
    for (int b = 0; b <= 6; ++b) EXPECT_EQ(r[static_cast<std::size_t>(b)], 1);
    EXPECT_EQ(r[10], 1);
    EXPECT_EQ(u.block_position(), 9);
    BlockTT one = init_block_tt(std::vector<Index>(6, 2), 1, 2);
    EXPECT_EQ(one.max_rank(), 1);
    BlockTT small = init_block_tt(std::vector<Index>(6, 2), 5, 3);
    EXPECT_LT(orth_error(small), 1e-12);
    for (int n = 0; n < 5; ++n) EXPECT_TRUE(is_left_orthogonal(small.core(n)));
    EXPECT_THROW(init_block_tt(std::vector<Index>(2, 2), 5, 1), InvalidArgument);
}

TEST(Config, Validation) {
    MatrixTT a = identity_tt(4);
    EXPECT_THROW(als_svd(a, config(1)), ConfigError);
    SolverConfig bad = config(2);
    bad.epsilon = 0.0;
    EXPECT_THROW(mals_svd(a, bad), ConfigError);
    bad = config(2);
    bad.delta0 = -1.0;
    EXPECT_THROW(als_svd(a, bad), ConfigError);
    EXPECT_THROW(als_eig(a, config(1)), ConfigError);
}

TEST(Solvers, Identity) {
    MatrixTT a = identity_tt(5);
    SvdResult r = als_svd(a, config(2));
    EXPECT_NEAR(r.sigma(0), 1.0, 1e-12);
    EXPECT_NEAR(r.sigma(1), 1.0, 1e-12);
    EXPECT_LE(r.report.final_residual, 1e-12);
    EXPECT_EQ(r.report.termination, Termination::converged);
    SvdResult m = mals_svd(a, config(1));
    ASSERT_EQ(m.sigma.size(), 1);
    EXPECT_NEAR(m.sigma(0), 1.0, 1e-12);
    SvdResult e = als_eig(a, config(2));
    EXPECT_NEAR(e.sigma(0), 1.0, 1e-10);
    EXPECT_NEAR(e.sigma(1), 1.0, 1e-10);
}

TEST(Solvers, RandomAgainstDense) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        MatrixTT a = random_matrix_tt(8, 3, seed);
        const Vector ref = dense_sigma(a, 4);
        for (int m = 0; m < 4; ++m) {
            SvdResult r = m == 0 ? als_svd(a, config(4, 1e-9, seed)) : m == 1 ? mals_svd(a, config(4, 1e-9, seed))
                        : m == 2 ? als_eig(a, config(4, 1e-9, seed)) : mals_eig(a, config(4, 1e-9, seed));
            const double tol = m < 2 ? 1e-7 : 1e-5;
            EXPECT_LE((r.sigma - ref).norm() / ref.norm(), tol) << r.report.solver;
            EXPECT_LT(orth_error(r.u), 1e-8) << r.report.solver;
            EXPECT_LT(orth_error(r.v), 1e-8) << r.report.solver;
            EXPECT_EQ(r.u.block_position(), 7);
            EXPECT_TRUE(std::is_sorted(r.sigma.data(), r.sigma.data() + 4, std::greater<>()));
            EXPECT_GE(r.sigma.minCoeff(), 0.0);
        }
    }
}

TEST(Solvers, MalsSingleVector) {
    MatrixTT a = random_matrix_tt(8, 3, 9);
    const Vector ref = oracle::power_singular_values(tt_dense(a), 1);
    SvdResult r = mals_svd(a, config(1));
    EXPECT_LE(std::abs(r.sigma(0) - ref(0)), 1e-7 * ref(0));
}

TEST(Solvers, AlsSingleVectorFreezesRanks) {
    MatrixTT a = random_matrix_tt(6, 3, 10);
    SolverConfig c = config(1);
    c.allow_als_k1 = true;
    c.max_sweeps = 2;
    c.max_restarts = 0;
    bool grew = false;
    als_svd(a, c, [&](const MicroSnapshot& s) {
        grew = grew || s.record.rank_u > 1 || s.record.rank_v > 1;
    });
    EXPECT_FALSE(grew);
}

TEST(Solvers, PrescribedSpectrum) {
    PrescribedSvd p = prescribed_svd_matrix(10, 0.5);
    MatrixTT a = matrix_tt_round(p.a, 1e-13);
    SolverConfig c = config(10, 1e-8);
    for (int m = 0; m < 2; ++m) {
        SvdResult r = m == 0 ? als_svd(a, c) : mals_svd(a, c);
        EXPECT_LE((r.sigma - p.spectrum.head(10)).norm() / p.spectrum.head(10).norm(), 1e-6);
        EXPECT_LE(r.report.sweeps, 3);
    }
}

TEST(Solvers, SigmaConsistencyEnvironmentAndMonotonicity) {
    MatrixTT a = random_matrix_tt(6, 2, 11);
    const Matrix ad = tt_dense(a);
    SolverConfig c = config(3, 1e-12);
    c.max_sweeps = 2;
    c.max_restarts = 0;
    for (int m = 0; m < 2; ++m) {
        double worst_sigma = 0.0, worst_env = 0.0, worst_drop = 0.0;
        double previous = 0.0;
        auto observer = [&](const MicroSnapshot& s) {
            // Sigma = U^T A V after every split, up to truncation.
            const Matrix proj = tt_dense(s.u).transpose() * ad * tt_dense(s.v);
            worst_sigma = std::max(worst_sigma, (proj - Matrix(s.record.sigma.asDiagonal())).cwiseAbs().maxCoeff() / s.record.sigma(0));
            // Incremental environments against fresh recomputation.
            const int pos = s.u.block_position();
            DenseTensor l = env_boundary();
            for (int q = 0; q < pos; ++q) {
                l = env_left_step(l, s.u.core(q), a.core(q), s.v.core(q));
            }
            worst_env = std::max(worst_env, (vectorize(l) - vectorize(s.env.left[static_cast<std::size_t>(pos)])).norm());
            DenseTensor r = env_boundary();
            for (int q = a.length() - 1; q > pos; --q) {
                r = env_right_step(r, s.u.core(q), a.core(q), s.v.core(q));
            }
            worst_env = std::max(worst_env, (vectorize(r) - vectorize(s.env.right[static_cast<std::size_t>(pos)])).norm());
            const double trace = s.record.sigma.sum();
            worst_drop = std::max(worst_drop, previous - trace);
            previous = trace;
        };
        if (m == 0) {
            als_svd(a, c, observer);
        } else {
            mals_svd(a, c, observer);
        }
        EXPECT_LT(worst_sigma, 1e-9);
        EXPECT_LT(worst_env, 1e-11);
        // Slack 10 delta ||Sigma|| per step, with the first half sweep's larger delta.
        const double delta = 100.0 * c.epsilon / std::sqrt(5.0);
        EXPECT_LE(worst_drop, 10.0 * delta * previous + 1e-10);
    }
}

TEST(Solvers, RankCapAndSweepLimit) {
    HilbertTT h = hilbert_submatrix_tt(8, 1e-10);
    SolverConfig c = config(6, 1e-14);
    c.max_sweeps = 1;
    c.max_restarts = 1;
    c.max_rank = 4;
    SvdResult r = als_svd(h.matrix, c);
    EXPECT_LE(r.u.max_rank(), 4);
    EXPECT_LE(r.v.max_rank(), 4);
    EXPECT_EQ(r.report.termination, Termination::sweep_limit);
    EXPECT_EQ(r.report.restarts, 1);
    EXPECT_EQ(r.report.sweeps, 2);
    EXPECT_GT(r.report.final_residual, 0.0);
}

TEST(Solvers, Deterministic) {
    MatrixTT a = random_matrix_tt(7, 3, 12);
    SvdResult r1 = mals_svd(a, config(3));
    SvdResult r2 = mals_svd(a, config(3));
    EXPECT_EQ(r1.sigma, r2.sigma);
    EXPECT_EQ(r1.report.residuals, r2.report.residuals);
}

TEST(Residual, ExactTripletAndPerturbation) {
    PrescribedSvd p = prescribed_svd_matrix(6, 0.5);
    EXPECT_LE(residual(p.a, p.u0, p.v0, p.spectrum, 1e-14), 1e-10);
    double last = 0.0;
    for (double eta : {1e-3, 1e-2, 1e-1}) {
        std::vector<DenseTensor> cores = p.v0.cores();
        DenseTensor noise = testutil::random_tensor(cores[2].shape(), 5);
        noise *= eta;
        cores[2] += noise;
        BlockTT v(cores, p.v0.block_position());
        const double r = residual(p.a, p.u0, v, p.spectrum, 1e-14);
        EXPECT_GT(r, last);
        last = r;
    }
    EXPECT_THROW(residual(p.a, p.u0, p.v0, Vector::Zero(25), 1e-14), InvalidArgument);
}

TEST(Residual, AgainstDenseFormula) {
    MatrixTT a = random_matrix_tt(6, 3, 13);
    BlockTT u = random_block_tt(6, 3, 3, 14), v = random_block_tt(6, 3, 3, 15);
    Vector s(3);
    s << 3, 2, 1;
    const double dense = oracle::residual(tt_dense(a), tt_dense(u), tt_dense(v), s);
    EXPECT_NEAR(residual(a, u, v, s, 0.0), dense, 1e-10 * dense);
    EXPECT_NEAR(residual(a, move_block(u, 2), v, s, 0.0), dense, 1e-10 * dense);
}

TEST(Report, JsonShape) {
    SvdResult r = als_svd(random_matrix_tt(5, 2, 16), config(2));
    auto doc = nlohmann::json::parse(report_to_json(r.report, r.sigma));
    EXPECT_EQ(doc["solver"], "als_svd");
    EXPECT_EQ(doc["termination"], "converged");
    EXPECT_EQ(doc["sigma"].size(), 2u);
    EXPECT_EQ(doc["micro"].size(), r.report.micro.size());
    EXPECT_EQ(doc["ranks_v"].size(), 6u);
    EXPECT_TRUE(doc["micro"][0].contains("rank_u"));
}
