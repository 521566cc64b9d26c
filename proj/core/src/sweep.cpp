#include <chrono>
#include <cmath>
#include <string>

#include "engine.hpp"
#include "ttsvd/contract.hpp"
#include "ttsvd/errors.hpp"
#include "ttsvd/local_solver.hpp"
#include "ttsvd/structured.hpp"

namespace ttsvd {

namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

Matrix local_matrix(const DenseTensor& local) {
    const Index k = local.extent(local.order() - 1);
    return local.as_matrix(local.size() / k);
}

DenseTensor local_tensor(const Matrix& m, const DenseTensor& like) {
    return tensorize(Eigen::Map<const Vector>(m.data(), m.size()), like.shape());
}

std::vector<Index> with_k(std::vector<Index> shape, Index k) {
    shape.back() = k;
    return shape;
}

}  // namespace

const char* to_string(Termination t) {
    switch (t) {
    case Termination::converged: return "converged";
    case Termination::sweep_limit: return "sweep-limit";
    case Termination::restarted: return "restarted";
    }
    return "unknown";
}

void validate(const SolverConfig& cfg, int n_cores, bool als) {
    if (n_cores < 2) throw ConfigError("solver: the matrix TT needs at least two cores");
    if (cfg.k < 1) throw ConfigError("solver: K must be at least 1");
    if (als && cfg.k < 2 && !cfg.allow_als_k1) {
        throw ConfigError("solver: the ALS path needs K >= 2 (ranks cannot grow for K = 1); use MALS");
    }
    if (!(cfg.epsilon > 0.0)) throw ConfigError("solver: epsilon must be positive");
    if (cfg.delta0 && !(*cfg.delta0 >= 0.0)) throw ConfigError("solver: delta0 must be nonnegative");
    if (!(cfg.first_halfsweep_delta_factor >= 0.0)) throw ConfigError("solver: delta factor must be nonnegative");
    if (cfg.max_sweeps < 1) throw ConfigError("solver: max_sweeps must be at least 1");
    if (cfg.max_restarts < 0) throw ConfigError("solver: max_restarts must be nonnegative");
    if (!(cfg.restart_delta_factor > 0.0)) throw ConfigError("solver: restart delta factor must be positive");
    if (cfg.max_rank < 1) throw ConfigError("solver: max_rank must be at least 1");
    if (!(cfg.local_tol > 0.0)) throw ConfigError("solver: local tolerance must be positive");
}

BlockTT init_block_tt(const std::vector<Index>& modes, Index k, std::uint64_t seed) {
    const int n = static_cast<int>(modes.size());
    if (n < 1 || k < 1) throw InvalidArgument("init_block_tt: need at least one mode and K >= 1");
    std::vector<Index> ranks(static_cast<std::size_t>(n) + 1, 1);
    Index tail = 1;
    for (int b = n - 1; b >= 1; --b) {
        tail = std::min<Index>(tail * modes[static_cast<std::size_t>(b)], k);
        ranks[static_cast<std::size_t>(b)] = ceil_div(k, tail);
    }
    Index lead = 1;
    for (int b = 1; b < n; ++b) {
        lead = std::min<Index>(lead * modes[static_cast<std::size_t>(b) - 1], k);
        if (ranks[static_cast<std::size_t>(b)] > lead) {
            throw InvalidArgument("init_block_tt: K exceeds the number of rows");
        }
    }
    return random_block_tt(modes, ranks, k, seed);
}

namespace detail {

namespace {

struct Local {
    DenseTensor u;
    DenseTensor v;
    Vector sigma;
    int iterations = 0;
    bool converged = true;
};

class Engine {
public:
    Engine(const MatrixTT& op, Method method, Mode mode, const SolverConfig& cfg, const SweepObserver& observer)
        : a_(op), method_(method), mode_(mode), cfg_(cfg), observer_(observer), n_(op.length()), k_(cfg.k) {
        delta0_ = cfg.delta0 ? *cfg.delta0 : cfg.epsilon / std::sqrt(static_cast<double>(std::max(1, n_ - 1)));
    }

    void start(std::uint64_t seed) {
        BlockTT v0 = init_block_tt(a_.col_sizes(), k_, seed);
        BlockTT u0 = mode_ == Mode::eig ? v0 : init_block_tt(a_.row_sizes(), k_, seed ^ 0x5bd1e995ULL);
        u_ = u0.cores();
        v_ = v0.cores();
        pos_ = n_ - 1;
        ublock_ = block_core_to_local(u_.back());
        vblock_ = block_core_to_local(v_.back());
        env_ = env_init(u0, a_, v0);
    }

    void half_sweep(HalfSweep dir, double delta, std::vector<MicroRecord>& log) {
        if (dir == HalfSweep::right_to_left) {
            for (int p = n_ - 1; p >= 1; --p) log.push_back(step(p, dir, delta));
        } else {
            for (int p = 0; p + 1 < n_; ++p) log.push_back(step(p, dir, delta));
        }
    }

    /// Rayleigh-Ritz on the block subspaces at the last core.
    Vector finalize() {
        Matrix qv = dense_qr(local_matrix(vblock_)).q;
        const DenseTensor& l = env_.left[static_cast<std::size_t>(n_ - 1)];
        const DenseTensor& r = env_.right[static_cast<std::size_t>(n_ - 1)];
        const DenseTensor& ac = a_.core(n_ - 1);
        Matrix aqv = local_matrix(als_apply(l, ac, r, local_tensor(qv, vblock_)));
        Vector sigma;
        if (mode_ == Mode::svd) {
            Matrix qu = dense_qr(local_matrix(ublock_)).q;
            SvdFactors f = dense_svd(gemm_tn(qu, aqv));
            Matrix u = gemm(qu, f.u);
            Matrix v = gemm(qv, f.v);
            fix_signs(u, &v);
            ublock_ = local_tensor(u, ublock_);
            vblock_ = local_tensor(v, vblock_);
            sigma = f.s;
        } else {
            Matrix h = gemm_tn(qv, aqv);
            SymmetricEigen se = symmetric_eigen(0.5 * (h + h.transpose()));
            Matrix y = se.vectors.rowwise().reverse();
            Matrix v = gemm(qv, y);
            fix_signs(v, nullptr);
            vblock_ = local_tensor(v, vblock_);
            ublock_ = vblock_;
            sigma = se.values.reverse().cwiseMax(0.0).cwiseSqrt();
        }
        return sigma;
    }

    [[nodiscard]] BlockTT u_chain() const { return chain(u_, ublock_); }
    [[nodiscard]] BlockTT v_chain() const { return chain(v_, vblock_); }
    int local_failures = 0;

private:
    BlockTT chain(const std::vector<DenseTensor>& cores, const DenseTensor& block) const {
        std::vector<DenseTensor> c = cores;
        std::vector<Orth> tags(static_cast<std::size_t>(n_), Orth::none);
        for (int m = 0; m < n_; ++m) {
            if (m < pos_) tags[static_cast<std::size_t>(m)] = Orth::left;
            if (m > pos_) tags[static_cast<std::size_t>(m)] = Orth::right;
        }
        c[static_cast<std::size_t>(pos_)] = local_to_block_core(block);
        return BlockTT(std::move(c), pos_, std::move(tags));
    }

    [[nodiscard]] LocalSolverOptions local_options(int p) const {
        LocalSolverOptions o;
        o.tol = cfg_.local_tol;
        o.max_iterations = cfg_.local_max_iterations;
        o.dense_crossover = cfg_.dense_crossover;
        o.seed = cfg_.seed * 1000003ULL + static_cast<std::uint64_t>(p) + 7919ULL * static_cast<std::uint64_t>(calls_);
        return o;
    }

    // Solves the local problem on the given local tensors (4th order for ALS,
    // 5th for MALS); `p` is the left position of the active window.
    Local solve(int p, const DenseTensor& uloc, const DenseTensor& vloc) {
        ++calls_;
        const auto pu = static_cast<std::size_t>(p);
        const DenseTensor& l = env_.left[pu];
        const bool merged = uloc.order() == 5;
        const DenseTensor& r = env_.right[merged ? pu + 1 : pu];
        const DenseTensor& a1 = a_.core(p);
        const DenseTensor* a2 = merged ? &a_.core(p + 1) : nullptr;
        const Matrix u0 = local_matrix(uloc);
        const Matrix v0 = local_matrix(vloc);
        auto apply = [&](const Matrix& y) {
            DenseTensor t = tensorize(Eigen::Map<const Vector>(y.data(), y.size()), with_k(vloc.shape(), y.cols()));
            DenseTensor out = merged ? mals_apply(l, a1, *a2, r, t) : als_apply(l, a1, r, t);
            return Matrix(out.as_matrix(out.size() / y.cols()));
        };
        Local out;
        if (mode_ == Mode::svd) {
            auto apply_t = [&](const Matrix& x) {
                DenseTensor t =
                    tensorize(Eigen::Map<const Vector>(x.data(), x.size()), with_k(uloc.shape(), x.cols()));
                DenseTensor res = merged ? mals_apply_transpose(l, a1, *a2, r, t) : als_apply_transpose(l, a1, r, t);
                return Matrix(res.as_matrix(res.size() / x.cols()));
            };
            LocalSvd s = local_block_svd(apply, apply_t, u0.rows(), v0.rows(), k_, local_options(p), &u0, &v0);
            out.u = local_tensor(s.u, uloc);
            out.v = local_tensor(s.v, vloc);
            out.sigma = s.s;
            out.iterations = s.iterations;
            out.converged = s.converged;
        } else {
            LocalEig e = local_symmetric_eig(apply, v0.rows(), k_, local_options(p), &v0);
            out.v = local_tensor(e.vectors, vloc);
            out.u = out.v;
            out.sigma = e.values.cwiseMax(0.0).cwiseSqrt();
            out.iterations = e.iterations;
            out.converged = e.converged;
        }
        if (!out.converged) ++local_failures;
        return out;
    }

    TruncationOptions split_options(Index floor) const {
        TruncationOptions o;
        o.drop_numerical_zeros = true;
        o.max_rank = cfg_.max_rank;
        o.min_rank = floor;
        return o;
    }

    // One micro-iteration: the block sits at p and leaves towards `dir`.
    MicroRecord step(int p, HalfSweep dir, double delta) {
        const bool rl = dir == HalfSweep::right_to_left;
        const auto pu = static_cast<std::size_t>(p);
        MicroRecord rec;
        rec.position = p;
        rec.direction = dir;

        if (method_ == Method::als) {
            Local sol = solve(p, ublock_, vblock_);
            rec.sigma = sol.sigma;
            rec.local_iterations = sol.iterations;
            rec.local_converged = sol.converged;
            if (rl) {
                auto split_into = [&](std::vector<DenseTensor>& cores, const DenseTensor& local) {
                    const DenseTensor& nb = cores[pu - 1];
                    SplitResult s = split_block_core(local, SplitDirection::left, delta,
                                                     split_options(ceil_div(k_, nb.extent(0) * nb.extent(1))));
                    cores[pu] = std::move(s.second);
                    DenseTensor block = block_core_to_local(absorb_carrier(s.first, nb, SplitDirection::left));
                    return std::make_pair(std::move(block), s.rank);
                };
                auto [vb, rv] = split_into(v_, sol.v);
                vblock_ = std::move(vb);
                rec.rank_v = rv;
                if (mode_ == Mode::svd) {
                    auto [ub, ru] = split_into(u_, sol.u);
                    ublock_ = std::move(ub);
                    rec.rank_u = ru;
                } else {
                    u_[pu] = v_[pu];
                    ublock_ = vblock_;
                    rec.rank_u = rv;
                }
                pos_ = p - 1;
                env_.right[pu - 1] = env_right_step(env_.right[pu], u_[pu], a_.core(p), v_[pu]);
            } else {
                auto split_into = [&](std::vector<DenseTensor>& cores, const DenseTensor& local) {
                    const DenseTensor& nb = cores[pu + 1];
                    SplitResult s = split_block_core(local, SplitDirection::right, delta,
                                                     split_options(ceil_div(k_, nb.extent(1) * nb.extent(2))));
                    cores[pu] = std::move(s.first);
                    DenseTensor block = block_core_to_local(absorb_carrier(s.second, nb, SplitDirection::right));
                    return std::make_pair(std::move(block), s.rank);
                };
                auto [vb, rv] = split_into(v_, sol.v);
                vblock_ = std::move(vb);
                rec.rank_v = rv;
                if (mode_ == Mode::svd) {
                    auto [ub, ru] = split_into(u_, sol.u);
                    ublock_ = std::move(ub);
                    rec.rank_u = ru;
                } else {
                    u_[pu] = v_[pu];
                    ublock_ = vblock_;
                    rec.rank_u = rv;
                }
                pos_ = p + 1;
                env_.left[pu + 1] = env_left_step(env_.left[pu], u_[pu], a_.core(p), v_[pu]);
            }
        } else {
            // Window (p-1, p) when moving left, (p, p+1) when moving right.
            const int w = rl ? p - 1 : p;
            const auto wu = static_cast<std::size_t>(w);
            auto merge = [&](const std::vector<DenseTensor>& cores, const DenseTensor& block) {
                if (rl) return contract_last_first(cores[wu], block);
                return contract(block, {2}, cores[wu + 1], {0}).permuted({0, 1, 3, 4, 2});
            };
            Local sol = solve(w, merge(u_, ublock_), merge(v_, vblock_));
            rec.sigma = sol.sigma;
            rec.local_iterations = sol.iterations;
            rec.local_converged = sol.converged;
            auto split_into = [&](std::vector<DenseTensor>& cores, const DenseTensor& local) {
                const Index rl_bond = local.extent(0), i1 = local.extent(1), i2 = local.extent(2),
                            rr_bond = local.extent(3);
                if (rl) {
                    SplitResult s = split_block_core(local, SplitDirection::left, delta,
                                                     split_options(ceil_div(k_, rl_bond * i1)));
                    cores[wu + 1] = std::move(s.second);
                    return std::make_pair(block_core_to_local(s.first), s.rank);
                }
                SplitResult s = split_block_core(local, SplitDirection::right, delta,
                                                 split_options(ceil_div(k_, i2 * rr_bond)));
                cores[wu] = std::move(s.first);
                return std::make_pair(block_core_to_local(s.second), s.rank);
            };
            auto [vb, rv] = split_into(v_, sol.v);
            vblock_ = std::move(vb);
            rec.rank_v = rv;
            if (mode_ == Mode::svd) {
                auto [ub, ru] = split_into(u_, sol.u);
                ublock_ = std::move(ub);
                rec.rank_u = ru;
            } else {
                u_ = v_;
                ublock_ = vblock_;
                rec.rank_u = rv;
            }
            if (rl) {
                pos_ = w;
                env_.right[wu] = env_right_step(env_.right[wu + 1], u_[wu + 1], a_.core(w + 1), v_[wu + 1]);
            } else {
                pos_ = w + 1;
                env_.left[wu + 1] = env_left_step(env_.left[wu], u_[wu], a_.core(w), v_[wu]);
            }
        }
        if (observer_) {
            BlockTT u = u_chain();
            BlockTT v = v_chain();
            observer_(MicroSnapshot{rec, u, v, env_, a_});
        }
        return rec;
    }

    const MatrixTT& a_;
    Method method_;
    Mode mode_;
    const SolverConfig& cfg_;
    const SweepObserver& observer_;
    int n_;
    Index k_;
    double delta0_ = 0.0;
    std::vector<DenseTensor> u_;
    std::vector<DenseTensor> v_;
    DenseTensor ublock_;
    DenseTensor vblock_;
    int pos_ = 0;
    Environment env_;
    int calls_ = 0;

public:
    [[nodiscard]] double delta0() const { return delta0_; }
};

}  // namespace

SvdResult run_sweeps(const MatrixTT& op, Method method, Mode mode, const SolverConfig& cfg, const StopMeasure& stop,
                     const SweepObserver& observer, const char* name) {
    validate(cfg, op.length(), method == Method::als);
    const Index rows = op.rows(), cols = op.cols();
    if (cfg.k > std::min(rows, cols)) throw ConfigError("solver: K exceeds the matrix dimensions");

    const auto t0 = std::chrono::steady_clock::now();
    Engine engine(op, method, mode, cfg, observer);
    SvdResult best;
    double best_r = std::numeric_limits<double>::infinity();
    SweepReport report;
    report.solver = name;
    double delta0 = engine.delta0();

    for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
        if (attempt > 0) {
            ++report.restarts;
            delta0 *= cfg.restart_delta_factor;
            report.residuals.clear();
        }
        engine.start(cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
        int half = 0;
        for (int s = 0; s < cfg.max_sweeps; ++s) {
            for (HalfSweep dir : {HalfSweep::right_to_left, HalfSweep::left_to_right}) {
                const double delta = half == 0 ? cfg.first_halfsweep_delta_factor * delta0 : delta0;
                engine.half_sweep(dir, delta, report.micro);
                ++half;
            }
            Vector sigma = engine.finalize();
            BlockTT u = engine.u_chain();
            BlockTT v = engine.v_chain();
            const double r = stop(u, v, sigma);
            ++report.sweeps;
            report.residuals.push_back(r);
            if (!(r >= best_r)) {
                best_r = r;
                best.sigma = sigma;
                best.u = std::move(u);
                best.v = std::move(v);
            }
            if (r < cfg.epsilon) {
                report.termination = attempt == 0 ? Termination::converged : Termination::restarted;
                report.final_residual = best_r;
                report.local_failures = engine.local_failures;
                report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                report.ranks_u = best.u.ranks();
                report.ranks_v = best.v.ranks();
                best.report = std::move(report);
                return best;
            }
        }
    }
    report.termination = Termination::sweep_limit;
    report.final_residual = best_r;
    report.local_failures = engine.local_failures;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.ranks_u = best.u.ranks();
    report.ranks_v = best.v.ranks();
    best.report = std::move(report);
    return best;
}

}  // namespace detail

SvdResult als_svd(const MatrixTT& a, const SolverConfig& cfg, const SweepObserver& observer) {
    const double round_delta = cfg.residual_round_factor * cfg.epsilon;
    auto stop = [&](const BlockTT& u, const BlockTT& v, const Vector& s) {
        return residual(a, u, v, s, round_delta);
    };
    return detail::run_sweeps(a, detail::Method::als, detail::Mode::svd, cfg, stop, observer, "als_svd");
}

SvdResult mals_svd(const MatrixTT& a, const SolverConfig& cfg, const SweepObserver& observer) {
    const double round_delta = cfg.residual_round_factor * cfg.epsilon;
    auto stop = [&](const BlockTT& u, const BlockTT& v, const Vector& s) {
        return residual(a, u, v, s, round_delta);
    };
    return detail::run_sweeps(a, detail::Method::mals, detail::Mode::svd, cfg, stop, observer, "mals_svd");
}

}  // namespace ttsvd
