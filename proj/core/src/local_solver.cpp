#include "ttsvd/local_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ttsvd/contract.hpp"
#include "ttsvd/errors.hpp"

namespace ttsvd {

namespace {

struct RitzResult {
    Vector values;   // descending
    Matrix vectors;  // orthonormal columns
    int iterations = 0;
    bool converged = false;
};

// Orthogonalizes the columns of w against the orthonormal basis v and among
// themselves (two passes of classical Gram-Schmidt); columns that vanish are dropped.
Matrix orthonormalize_against(const Matrix& v, Matrix w) {
    const double drop = 1e-10;
    for (int pass = 0; pass < 2; ++pass) {
        if (v.cols() > 0) w -= v * gemm_tn(v, w);
    }
    Matrix out(w.rows(), 0);
    for (Index j = 0; j < w.cols(); ++j) {
        Vector c = w.col(j);
        const double before = c.norm();
        if (before == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (v.cols() > 0) c -= v * (v.transpose() * c);
            if (out.cols() > 0) c -= out * (out.transpose() * c);
        }
        const double after = c.norm();
        if (after <= drop * before || after == 0.0) continue;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = c / after;
    }
    return out;
}

Matrix random_block(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    return m;
}

// Largest algebraic eigenpairs of a symmetric operator by a thick-restart block
// Krylov (residual expansion) iteration with full reorthogonalization. `want`
// Ritz pairs are tracked, the leading `k` decide convergence.
RitzResult top_eigenpairs(const BlockOperator& op, Index dim, Index k, Index want, const Matrix& start,
                          const LocalSolverOptions& opts) {
    want = std::min(want, dim);
    k = std::min(k, want);
    const Index max_basis = std::min(dim, std::max<Index>(3 * want, want + 4 * k));
    std::mt19937_64 rng(opts.seed);

    Matrix v = orthonormalize_against(Matrix(dim, 0), start);
    if (v.cols() < want) {
        Matrix fill = orthonormalize_against(v, random_block(dim, want - v.cols() + 2, rng));
        Matrix joined(dim, v.cols() + fill.cols());
        joined << v, fill;
        v = joined.leftCols(std::min(joined.cols(), want));
    }
    Matrix av = op(v);

    RitzResult res;
    for (int it = 0;; ++it) {
        Matrix h = gemm_tn(v, av);
        h = 0.5 * (h + h.transpose()).eval();
        SymmetricEigen se = symmetric_eigen(h);
        const Index nv = v.cols();
        const Index nw = std::min(want, nv);
        Matrix y(nv, nw);
        Vector theta(nw);
        for (Index j = 0; j < nw; ++j) {
            y.col(j) = se.vectors.col(nv - 1 - j);
            theta[j] = se.values[nv - 1 - j];
        }
        Matrix x = gemm(v, y);
        Matrix ax = gemm(av, y);
        Matrix r = ax - x * theta.asDiagonal();
        const double scale = std::max(std::abs(theta[0]), std::abs(se.values[0]));
        const double bound = opts.tol * std::max(scale, std::numeric_limits<double>::min());

        std::vector<Index> open;
        for (Index j = 0; j < std::min(k, nw); ++j) {
            if (r.col(j).norm() > bound) open.push_back(j);
        }
        res.values = theta;
        res.vectors = x;
        res.iterations = it;
        res.converged = open.empty();
        if (open.empty() || it >= opts.max_iterations || nv >= dim) break;

        // Expand with residuals of the unconverged wanted pairs and of a few
        // trailing tracked pairs to keep the block Krylov character.
        Matrix dirs(dim, 0);
        std::vector<Index> cols = open;
        for (Index j = k; j < nw && static_cast<Index>(cols.size()) < k + 2; ++j) cols.push_back(j);
        dirs.resize(dim, static_cast<Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) dirs.col(static_cast<Index>(c)) = r.col(cols[c]);

        if (nv + dirs.cols() > max_basis) {
            v = x;
            av = ax;
        }
        Matrix w = orthonormalize_against(v, dirs);
        if (w.cols() == 0) {
            w = orthonormalize_against(v, random_block(dim, 1, rng));
            if (w.cols() == 0) break;
        }
        Matrix aw = op(w);
        Matrix nvv(dim, v.cols() + w.cols());
        nvv << v, w;
        Matrix nav(dim, av.cols() + aw.cols());
        nav << av, aw;
        v = std::move(nvv);
        av = std::move(nav);
    }
    return res;
}

Matrix materialize(const BlockOperator& op, Index cols) { return op(Matrix::Identity(cols, cols)); }

}  // namespace

void fix_signs(Matrix& lead, Matrix* follow) {
    for (Index j = 0; j < lead.cols(); ++j) {
        Index best = 0;
        double mag = -1.0;
        for (Index i = 0; i < lead.rows(); ++i) {
            if (std::abs(lead(i, j)) > mag) {
                mag = std::abs(lead(i, j));
                best = i;
            }
        }
        if (lead.rows() > 0 && lead(best, j) < 0.0) {
            lead.col(j) *= -1.0;
            if (follow != nullptr) follow->col(j) *= -1.0;
        }
    }
}

LocalSvd local_block_svd(const BlockOperator& matvec, const BlockOperator& rmatvec, Index m, Index n, Index k,
                         const LocalSolverOptions& opts, const Matrix* u0, const Matrix* v0) {
    if (k < 1 || k > std::min(m, n)) throw InvalidArgument("local_block_svd: K must lie in [1, min(m, n)]");
    LocalSvd out;
    if (m + n <= opts.dense_crossover) {
        Matrix a = materialize(matvec, n);
        SvdFactors f = dense_svd(a);
        out.u = f.u.leftCols(k);
        out.v = f.v.leftCols(k);
        out.s = f.s.head(k);
        out.dense = true;
        fix_signs(out.u, &out.v);
        return out;
    }
    const Index dim = m + n;
    auto op = [&](const Matrix& z) {
        Matrix out_z(dim, z.cols());
        out_z.topRows(m) = matvec(z.bottomRows(n));
        out_z.bottomRows(n) = rmatvec(z.topRows(m));
        return out_z;
    };
    Matrix start(dim, 0);
    if (u0 != nullptr && v0 != nullptr && u0->rows() == m && v0->rows() == n && u0->cols() == v0->cols()) {
        start.resize(dim, u0->cols());
        start.topRows(m) = *u0;
        start.bottomRows(n) = *v0;
    }
    RitzResult rr = top_eigenpairs(op, dim, k, 2 * k + opts.extra, start, opts);
    out.iterations = rr.iterations;
    out.converged = rr.converged;

    // Two-sided Rayleigh-Ritz on the recovered subspaces: orthonormal U and V
    // with U^T A V = diag(s).
    const Matrix z = rr.vectors.leftCols(k);
    Matrix qu = dense_qr(z.topRows(m)).q;
    Matrix qv = dense_qr(z.bottomRows(n)).q;
    Matrix small = gemm_tn(qu, matvec(qv));
    SvdFactors f = dense_svd(small);
    out.u = gemm(qu, f.u);
    out.v = gemm(qv, f.v);
    out.s = f.s;
    fix_signs(out.u, &out.v);
    return out;
}

LocalEig local_symmetric_eig(const BlockOperator& op, Index n, Index k, const LocalSolverOptions& opts,
                             const Matrix* x0) {
    if (k < 1 || k > n) throw InvalidArgument("local_symmetric_eig: K must lie in [1, n]");
    LocalEig out;
    if (n <= opts.dense_crossover) {
        Matrix a = materialize(op, n);
        SymmetricEigen se = symmetric_eigen(0.5 * (a + a.transpose()));
        out.values.resize(k);
        out.vectors.resize(n, k);
        for (Index j = 0; j < k; ++j) {
            out.values[j] = se.values[n - 1 - j];
            out.vectors.col(j) = se.vectors.col(n - 1 - j);
        }
        out.dense = true;
        fix_signs(out.vectors, nullptr);
        return out;
    }
    Matrix start(n, 0);
    if (x0 != nullptr && x0->rows() == n) start = *x0;
    RitzResult rr = top_eigenpairs(op, n, k, 2 * k + opts.extra, start, opts);
    out.values = rr.values.head(k);
    out.vectors = rr.vectors.leftCols(k);
    out.iterations = rr.iterations;
    out.converged = rr.converged;
    fix_signs(out.vectors, nullptr);
    return out;
}

}  // namespace ttsvd
