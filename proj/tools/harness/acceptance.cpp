#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "oracles.hpp"
#include "report.hpp"
#include "ttsvd/contract.hpp"
#include "ttsvd/environment.hpp"
#include "ttsvd/solver.hpp"
#include "ttsvd/structured.hpp"

namespace ttsvd::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Vector dense_vector(const VectorTT& x) { return vectorize(tt_reconstruct(x)); }

Vector dense_singular_values(const Matrix& a) {
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

double orthonormality_error(const Matrix& q) {
    return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

// 1: prescribed spectrum at N = 12.
CriterionResult prescribed_accuracy() {
    constexpr double kSpectrumTol = 1e-6;
    constexpr int kMaxSweeps = 3;
    constexpr double kMaxSeconds = 60.0;
    CriterionResult res{1, "prescribed-spectrum accuracy (N=12, beta in {0.3, 0.5}, K=10)", true, ""};
    double worst_err = 0.0, worst_time = 0.0;
    int worst_sweeps = 0;
    for (double beta : {0.3, 0.5}) {
        PrescribedSvd p = prescribed_svd_matrix(12, beta);
        const MatrixTT a = matrix_tt_round(p.a, 1e-13);
        SolverConfig cfg;
        cfg.k = 10;
        cfg.epsilon = 1e-8;
        for (int m = 0; m < 2; ++m) {
            SvdResult r = m == 0 ? als_svd(a, cfg) : mals_svd(a, cfg);
            const Vector truth = p.spectrum.head(10);
            const double err = (r.sigma - truth).norm() / truth.norm();
            worst_err = std::max(worst_err, err);
            worst_time = std::max(worst_time, r.report.seconds);
            worst_sweeps = std::max(worst_sweeps, r.report.sweeps);
            const bool ok = err <= kSpectrumTol && r.report.termination == Termination::converged &&
                            r.report.sweeps <= kMaxSweeps && r.report.seconds <= kMaxSeconds;
            if (!ok) {
                res.passed = false;
                res.detail += r.report.solver + " beta=" + fmt("%g", beta) + " failed; ";
            }
        }
    }
    res.detail += "max spectrum error " + fmt("%.2e", worst_err) + ", max sweeps " + std::to_string(worst_sweeps) +
                  ", max time " + fmt("%.2f", worst_time) + " s";
    return res;
}

struct RandomCase {
    int n;
    Index rank;
    Index k;
    std::uint64_t seed;
};

std::vector<RandomCase> random_cases(int count) {
    std::vector<RandomCase> cases;
    for (int i = 0; i < count; ++i) {
        cases.push_back({4 + i % 5, 1 + i % 3, 2 + (i / 3) % 3, 1000 + static_cast<std::uint64_t>(i)});
    }
    return cases;
}

// 2: solver output against the dense SVD of the reconstructed matrix.
CriterionResult dense_equivalence() {
    constexpr double kSigmaTol = 1e-7;
    constexpr double kOrthTol = 1e-8;
    CriterionResult res{2, "dense-oracle equivalence (20 random matrix TTs, N <= 8, K <= 4)", true, ""};
    double worst_sigma = 0.0, worst_orth = 0.0;
    for (const RandomCase& c : random_cases(20)) {
        const MatrixTT a = random_matrix_tt(c.n, c.rank, c.seed);
        const Vector truth = dense_singular_values(tt_reconstruct(a)).head(c.k);
        SolverConfig cfg;
        cfg.k = c.k;
        cfg.epsilon = 1e-9;
        cfg.seed = c.seed;
        for (int m = 0; m < 2; ++m) {
            SvdResult r = m == 0 ? als_svd(a, cfg) : mals_svd(a, cfg);
            const double es = (r.sigma - truth).norm() / truth.norm();
            const double eo = std::max(orthonormality_error(tt_reconstruct(r.u)), orthonormality_error(tt_reconstruct(r.v)));
            worst_sigma = std::max(worst_sigma, es);
            worst_orth = std::max(worst_orth, eo);
            if (es > kSigmaTol || eo > kOrthTol) {
                res.passed = false;
                res.detail += r.report.solver + " seed " + std::to_string(c.seed) + " failed; ";
            }
        }
    }
    res.detail += "max sigma error " + fmt("%.2e", worst_sigma) + ", max ||Q^T Q - I|| " + fmt("%.2e", worst_orth);
    return res;
}

// 3: reported residual against the dense residual formula.
CriterionResult residual_contract() {
    CriterionResult res{3, "residual contract (TT residual vs dense formula, N <= 8)", true, ""};
    int converged = 0;
    double worst_gap = 0.0, worst_r = 0.0;
    for (const RandomCase& c : random_cases(10)) {
        const MatrixTT a = random_matrix_tt(c.n, c.rank, c.seed);
        const Matrix ad = tt_reconstruct(a);
        SolverConfig cfg;
        cfg.k = c.k;
        cfg.epsilon = 1e-8;
        cfg.seed = c.seed;
        const double round_delta = cfg.residual_round_factor * cfg.epsilon;
        for (const char* name : {"als_svd", "mals_svd", "als_eig", "mals_eig"}) {
            const std::string s = name;
            SvdResult r = s == "als_svd" ? als_svd(a, cfg) : s == "mals_svd" ? mals_svd(a, cfg)
                        : s == "als_eig" ? als_eig(a, cfg) : mals_eig(a, cfg);
            if (r.report.termination == Termination::sweep_limit) continue;
            ++converged;
            const Matrix u = tt_reconstruct(r.u);
            const Matrix v = tt_reconstruct(r.v);
            const double dense_r = oracle::residual(ad, u, v, r.sigma);
            // Rounding A^T U at delta moves the norm by at most delta sqrt(N-1) ||A^T U||.
            const double slack = 1e-8 + round_delta * std::sqrt(c.n - 1.0) * (ad.transpose() * u).norm() / r.sigma.norm();
            const double gap = std::abs(dense_r - r.report.final_residual);
            worst_gap = std::max(worst_gap, gap);
            worst_r = std::max(worst_r, r.report.final_residual);
            if (!(r.report.final_residual < cfg.epsilon) || gap > slack) {
                res.passed = false;
                res.detail += s + " seed " + std::to_string(c.seed) + " failed; ";
            }
        }
    }
    if (converged == 0) res.passed = false;
    res.detail += std::to_string(converged) + " converged runs, max r " + fmt("%.2e", worst_r) +
                  ", max |r_tt - r_dense| " + fmt("%.2e", worst_gap);
    return res;
}

double rel_gap(const Matrix& a, const Matrix& b) {
    const double nb = b.norm();
    return nb > 0.0 ? (a - b).norm() / nb : (a - b).norm();
}

bool doubled_ranks(const MatrixTT& t, const VectorTT& s) {
    const std::vector<Index> rt = t.ranks();
    const std::vector<Index> rs = s.ranks();
    for (std::size_t b = 1; b + 1 < rt.size(); ++b) {
        if (rt[b] != 2 * rs[b]) return false;
    }
    return rt.front() == 1 && rt.back() == 1;
}

// 4: structured generators against their index rules.
CriterionResult generator_exactness() {
    constexpr double kTol = 1e-12;
    constexpr int kSeeds = 20;
    CriterionResult res{4, "structured-generator exactness (N <= 6, 20 seeds)", true, ""};
    double worst = 0.0;
    bool ranks_ok = true;
    auto record = [&](double gap, const std::string& what) {
        worst = std::max(worst, gap);
        if (gap > kTol) {
            res.passed = false;
            res.detail += what + " mismatch; ";
        }
    };
    for (int n = 2; n <= 6; ++n) {
        const Index m = Index{1} << n;
        record(rel_gap(tt_reconstruct(shift_tt(n)), oracle::shift(m)), "shift");
        record(rel_gap(tt_reconstruct(shift_transpose_tt(n)), oracle::shift(m).transpose()), "shift transpose");
        for (int seed = 1; seed <= kSeeds; ++seed) {
            const std::uint64_t sd = static_cast<std::uint64_t>(seed) * 7919u + static_cast<std::uint64_t>(n);
            const Index rank = 1 + seed % 3;
            const VectorTT s = random_vector_tt(n, rank, sd);
            const Vector sv = dense_vector(s);
            const MatrixTT t = toeplitz_tt(s);
            const MatrixTT h = hankel_tt(s);
            record(rel_gap(tt_reconstruct(t), oracle::upper_toeplitz(sv)), "toeplitz");
            record(rel_gap(tt_reconstruct(h), oracle::upper_antihankel(sv)), "hankel");
            record(rel_gap(tt_reconstruct(hankel_submatrix_tt(s)), oracle::upper_antihankel(sv).leftCols(m / 2)),
                   "hankel submatrix");
            ranks_ok = ranks_ok && doubled_ranks(t, s) && doubled_ranks(h, s);
            const VectorTT a = random_vector_tt(n, rank, sd + 1);
            const VectorTT b = random_vector_tt(n, rank, sd + 2);
            const VectorTT c = random_vector_tt(n, rank, sd + 3);
            record(rel_gap(tt_reconstruct(tridiagonal_tt(a, b, c)),
                           oracle::tridiagonal(dense_vector(a), dense_vector(b), dense_vector(c))),
                   "tridiagonal");
            const VectorTT x = random_vector_tt(n + 1, rank, sd + 4);
            record(rel_gap(tt_reconstruct(full_toeplitz_tt(x)), oracle::full_toeplitz(dense_vector(x))),
                   "full toeplitz");
        }
    }
    if (!ranks_ok) {
        res.passed = false;
        res.detail += "toeplitz/hankel ranks differ from 2R; ";
    }
    res.detail += "max relative error " + fmt("%.2e", worst) + (ranks_ok ? ", ranks exactly 2R" : "");
    return res;
}

// 5: eigenvalues of the block matrix [[0, A], [A^T, 0]] and the trace optimum.
CriterionResult block_matrix_identities() {
    constexpr double kTol = 1e-10;
    CriterionResult res{5, "block-matrix eigenvalue and trace identities (50 random A)", true, ""};
    double worst_eig = 0.0, worst_trace = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Index q = 1 + (i * 7) % 30;
        const Index p = q + (i * 13) % (31 - q);
        const Matrix a = oracle::random_normal(p, q, 500 + static_cast<std::uint64_t>(i));
        Matrix b = Matrix::Zero(p + q, p + q);
        b.topRightCorner(p, q) = a;
        b.bottomLeftCorner(q, p) = a.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> es(b);
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector s = svd.singularValues();
        std::vector<double> expected;
        for (Index k = 0; k < q; ++k) {
            expected.push_back(s(k));
            expected.push_back(-s(k));
        }
        for (Index k = 0; k < p - q; ++k) expected.push_back(0.0);
        std::sort(expected.begin(), expected.end());
        for (Index k = 0; k < p + q; ++k) {
            worst_eig = std::max(worst_eig, std::abs(es.eigenvalues()(k) - expected[static_cast<std::size_t>(k)]));
        }
        const Index kk = 1 + i % q;
        const double trace = (svd.matrixU().leftCols(kk).transpose() * a * svd.matrixV().leftCols(kk)).trace();
        worst_trace = std::max(worst_trace, std::abs(trace - s.head(kk).sum()));
    }
    res.passed = worst_eig <= kTol && worst_trace <= kTol;
    res.detail = "max eigenvalue gap " + fmt("%.2e", worst_eig) + ", max trace gap " + fmt("%.2e", worst_trace);
    return res;
}

// 6: TT-SVD and TT rounding error bounds.
CriterionResult rounding_guarantees() {
    CriterionResult res{6, "tt_svd_compress / tt_round error bounds (100 instances x 3 deltas)", true, ""};
    double worst_ratio = 0.0;
    int checks = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + i % 7;
        std::vector<Index> shape(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) shape[static_cast<std::size_t>(d)] = 2 + (i + d) % 2;
        Index size = 1;
        for (Index e : shape) size *= e;
        const Matrix raw = oracle::random_normal(size, 1, 9000 + static_cast<std::uint64_t>(i));
        const DenseTensor t = tensorize(Eigen::Map<const Vector>(raw.data(), size), shape);
        // A low-rank-plus-noise vector in TT form for rounding.
        const VectorTT low = random_vector_tt(n, 3, 7000 + static_cast<std::uint64_t>(i));
        const VectorTT noise = tt_scale(random_vector_tt(n, 4, 8000 + static_cast<std::uint64_t>(i)), 1e-3);
        const VectorTT x = tt_add(low, noise);
        const Vector xd = dense_vector(x);
        const Vector td = vectorize(t);
        for (double delta : {1e-2, 1e-4, 1e-8}) {
            const double bound = delta * std::sqrt(n - 1.0);
            const double e1 = (vectorize(tt_reconstruct(tt_svd_compress(t, delta))) - td).norm() / td.norm();
            const double e2 = (dense_vector(tt_round(x, delta)) - xd).norm() / xd.norm();
            for (double e : {e1, e2}) {
                ++checks;
                if (bound > 0.0) worst_ratio = std::max(worst_ratio, e / bound);
                if (e > bound * (1.0 + 1e-9) + 1e-14) res.passed = false;
            }
        }
    }
    res.detail = std::to_string(checks) + " checks, max error/bound " + fmt("%.3f", worst_ratio);
    return res;
}

// 7: Hilbert submatrix at N = 10.
CriterionResult hilbert_experiment() {
    CriterionResult res{7, "Hilbert experiment (N=10, K=10, eps=1e-3)", true, ""};
    HilbertTT h = hilbert_submatrix_tt(10, 1e-8);
    SolverConfig cfg;
    cfg.k = 10;
    cfg.epsilon = 1e-3;
    std::ostringstream d;
    d << "matrix TT max rank " << h.matrix.max_rank() << ", generator max rank "
      << *std::max_element(h.generator_ranks.begin(), h.generator_ranks.end());
    for (int m = 0; m < 2; ++m) {
        SvdResult r = m == 0 ? als_svd(h.matrix, cfg) : mals_svd(h.matrix, cfg);
        const bool ok = r.report.termination != Termination::sweep_limit && r.report.final_residual < cfg.epsilon;
        res.passed = res.passed && ok;
        d << ", " << r.report.solver << " r=" << fmt("%.2e", r.report.final_residual) << " (" << r.report.sweeps
          << " sweeps)";
    }
    res.detail = d.str();
    return res;
}

// 8: wall time linear in N.
CriterionResult scaling_property() {
    constexpr double kMinR2 = 0.9;
    constexpr double kGrowth = 4.0;
    constexpr int kReps = 3;
    CriterionResult res{8, "scaling in N (prescribed beta=0.5, K=10, N=10..22)", true, ""};
    std::vector<double> ns, times;
    SolverConfig cfg;
    cfg.k = 10;
    cfg.epsilon = 1e-8;
    for (int n = 10; n <= 22; n += 2) {
        PrescribedSvd p = prescribed_svd_matrix(n, 0.5);
        const MatrixTT a = matrix_tt_round(p.a, 1e-13);
        std::vector<double> t;
        for (int rep = 0; rep < kReps; ++rep) t.push_back(als_svd(a, cfg).report.seconds);
        std::sort(t.begin(), t.end());
        ns.push_back(n);
        times.push_back(t[kReps / 2]);
    }
    const harness::LinearFit fit = harness::fit_line(ns, times);
    bool bounded = true;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (times[i] > kGrowth * times[0] * ns[i] / ns[0]) bounded = false;
    }
    res.passed = fit.r2 >= kMinR2 && bounded;
    res.detail = "median times";
    for (std::size_t i = 0; i < ns.size(); ++i) res.detail += " " + fmt("%.3f", times[i]);
    res.detail += " s, R^2 = " + fmt("%.3f", fit.r2) + (bounded ? "" : ", growth bound violated");
    return res;
}

// 9: K = 1.
CriterionResult single_vector() {
    constexpr double kTol = 1e-7;
    CriterionResult res{9, "K=1 behaviour (MALS accuracy, ALS rank freeze)", true, ""};
    double worst = 0.0;
    bool frozen = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MatrixTT a = random_matrix_tt(8, 3, 40 + seed);
        const Vector truth = oracle::power_singular_values(tt_reconstruct(a), 1);
        SolverConfig cfg;
        cfg.k = 1;
        cfg.epsilon = 1e-9;
        cfg.seed = seed;
        SvdResult r = mals_svd(a, cfg);
        const double err = std::abs(r.sigma(0) - truth(0)) / truth(0);
        worst = std::max(worst, err);
        if (err > kTol) res.passed = false;

        cfg.allow_als_k1 = true;
        cfg.max_sweeps = 3;
        const std::vector<Index> start = init_block_tt(a.col_sizes(), 1, seed).ranks();
        SvdResult f = als_svd(a, cfg, [&](const MicroSnapshot& s) {
            const std::vector<Index> ru = s.u.ranks();
            const std::vector<Index> rv = s.v.ranks();
            for (std::size_t b = 0; b < start.size(); ++b) {
                if (ru[b] > start[b] || rv[b] > start[b]) frozen = false;
            }
        });
        (void)f;
    }
    res.passed = res.passed && frozen;
    res.detail = "max relative sigma_1 error " + fmt("%.2e", worst) + (frozen ? ", ALS ranks frozen" : ", ALS ranks grew");
    return res;
}

DenseTensor random_tensor(std::vector<Index> shape, std::uint64_t seed) {
    Index size = 1;
    for (Index e : shape) size *= e;
    const Matrix raw = oracle::random_normal(size, 1, seed);
    return tensorize(Eigen::Map<const Vector>(raw.data(), size), std::move(shape));
}

// 10: multiply-accumulate counts against the complexity formulas.
CriterionResult complexity_counters() {
    CriterionResult res{10, "MAC counts within 2x of the complexity formulas", true, ""};
    double lo = 1e300, hi = 0.0;
    std::uint64_t seed = 1;
    for (Index r : {2, 3, 5}) {
        for (Index ra : {1, 2, 4}) {
            for (Index i : {2, 3}) {
                for (Index k : {1, 2, 4}) {
                    const DenseTensor left = random_tensor({r, ra, r}, seed++);
                    const DenseTensor right = random_tensor({r, ra, r}, seed++);
                    const DenseTensor a = random_tensor({ra, i, i, ra}, seed++);
                    const DenseTensor y = random_tensor({r, i, r, k}, seed++);
                    const DenseTensor u = random_tensor({r, i, r}, seed++);
                    const DenseTensor v = random_tensor({r, i, r}, seed++);
                    const double rd = static_cast<double>(r), ad = static_cast<double>(ra),
                                 id = static_cast<double>(i), kd = static_cast<double>(k);
                    const double env_formula = id * ad * (rd + id * ad) * rd * rd;
                    const double apply_formula = kd * env_formula;
                    std::vector<double> ratios;
                    {
                        MacScope scope;
                        (void)als_apply(left, a, right, y);
                        ratios.push_back(static_cast<double>(scope.elapsed()) / apply_formula);
                    }
                    {
                        MacScope scope;
                        (void)als_apply_transpose(left, a, right, y);
                        ratios.push_back(static_cast<double>(scope.elapsed()) / apply_formula);
                    }
                    {
                        MacScope scope;
                        (void)env_left_step(left, u, a, v);
                        ratios.push_back(static_cast<double>(scope.elapsed()) / env_formula);
                    }
                    {
                        MacScope scope;
                        (void)env_right_step(right, u, a, v);
                        ratios.push_back(static_cast<double>(scope.elapsed()) / env_formula);
                    }
                    for (double q : ratios) {
                        lo = std::min(lo, q);
                        hi = std::max(hi, q);
                        if (q < 0.5 || q > 2.0) res.passed = false;
                    }
                }
            }
        }
    }
    res.detail = "measured/formula in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]";
    return res;
}

}  // namespace

CriterionResult run_criterion(int id) {
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
        switch (id) {
        case 1: r = prescribed_accuracy(); break;
        case 2: r = dense_equivalence(); break;
        case 3: r = residual_contract(); break;
        case 4: r = generator_exactness(); break;
        case 5: r = block_matrix_identities(); break;
        case 6: r = rounding_guarantees(); break;
        case 7: r = hilbert_experiment(); break;
        case 8: r = scaling_property(); break;
        case 9: r = single_vector(); break;
        case 10: r = complexity_counters(); break;
        default: return {id, "unknown criterion", false, "no such criterion"};
        }
    } catch (const std::exception& e) {
        r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()};
    }
    r.detail += fmt(" [%.1f s]", std::chrono::duration<double>(Clock::now() - t0).count());
    return r;
}

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, const CriterionSink& sink) {
    std::vector<int> list = ids;
    if (list.empty()) {
        for (int i = 1; i <= criterion_count; ++i) list.push_back(i);
    }
    std::vector<CriterionResult> out;
    for (int id : list) {
        out.push_back(run_criterion(id));
        if (sink) sink(out.back());
    }
    return out;
}

std::string format_line(const CriterionResult& r) {
    return std::string(r.passed ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + ": " + r.name + " -- " +
           r.detail;
}

}  // namespace ttsvd::acceptance
