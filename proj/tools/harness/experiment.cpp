#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include <Eigen/SVD>

#include "ttsvd/errors.hpp"
#include "ttsvd/serialize.hpp"
#include "ttsvd/structured.hpp"

namespace ttsvd::harness {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Instance {
    MatrixTT a;
    std::optional<Vector> truth;  ///< leading singular values when known
    double construct_seconds = 0.0;
};

// Dense singular values are only affordable while the matrix stays small.
std::optional<Vector> dense_truth(const MatrixTT& a, int n, const GeneratorParams& g) {
    if (n > g.truth_max_n || a.rows() * a.cols() > (Index{1} << 24)) return std::nullopt;
    Eigen::BDCSVD<Matrix> svd(tt_reconstruct(a));
    return svd.singularValues();
}

VectorTT unit_random(int n, Index rank, std::uint64_t seed) {
    VectorTT x = random_vector_tt(n, rank, seed);
    return tt_scale(x, 1.0 / tt_norm(x));
}

Instance build_instance(const RunConfig& cfg, int n, double param, std::uint64_t seed) {
    const GeneratorParams& g = cfg.generator;
    Instance inst;
    const auto t0 = Clock::now();
    switch (cfg.experiment) {
    case Experiment::prescribed_svd: {
        PrescribedSvd p = prescribed_svd_matrix(n, param, g.k0, g.rank, seed);
        inst.a = matrix_tt_round(p.a, g.round_delta);
        inst.truth = p.spectrum;
        break;
    }
    case Experiment::hilbert:
        inst.a = hilbert_submatrix_tt(n, g.delta, g.hilbert_max_n).matrix;
        break;
    case Experiment::tridiagonal:
        inst.a = tridiagonal_tt(unit_random(n, g.rank, seed), unit_random(n, g.rank, seed + 1),
                                unit_random(n, g.rank, seed + 2), g.round_delta);
        break;
    case Experiment::toeplitz:
        inst.a = matrix_tt_round(full_toeplitz_tt(unit_random(n + 1, g.rank, seed)), g.round_delta);
        break;
    case Experiment::custom: {
        TTValue v = load_tt(g.matrix_path);
        if (!std::holds_alternative<MatrixTT>(v)) throw ConfigError("generator.matrix_path: not a matrix TT");
        inst.a = std::get<MatrixTT>(std::move(v));
        break;
    }
    }
    inst.construct_seconds = since(t0);
    if (!inst.truth) inst.truth = dense_truth(inst.a, inst.a.length(), g);
    return inst;
}

struct Group {
    std::string param_name;
    std::vector<double> values;  ///< NaN when the experiment has no swept parameter
};

Group parameters(const RunConfig& cfg) {
    switch (cfg.experiment) {
    case Experiment::prescribed_svd: return {"beta", cfg.generator.betas};
    case Experiment::toeplitz: {
        if (cfg.generator.rank_caps.empty()) return {"R_max", {std::nan("")}};
        Group g{"R_max", {}};
        for (Index c : cfg.generator.rank_caps) g.values.push_back(static_cast<double>(c));
        return g;
    }
    default: return {"", {std::nan("")}};
    }
}

std::string format_param(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

RunOutcome run_grid(const RunConfig& cfg, bool require_convergence, const ProgressSink& progress) {
    RunOutcome out;
    const Group group = parameters(cfg);
    const std::vector<int> ns = cfg.experiment == Experiment::custom ? std::vector<int>{0} : cfg.n_values;
    for (int n : ns) {
        for (double param : group.values) {
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
                const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
                Instance inst = build_instance(cfg, n, param, seed);
                for (const std::string& solver : cfg.solvers) {
                    SolverConfig sc = cfg.solver;
                    sc.seed = seed;
                    if (group.param_name == "R_max" && !std::isnan(param)) sc.max_rank = static_cast<Index>(param);
                    ResultRow row;
                    row.experiment = to_string(cfg.experiment);
                    row.solver = solver;
                    row.n = inst.a.length();
                    row.k = sc.k;
                    row.param_name = group.param_name;
                    row.param = param;
                    row.rep = rep;
                    row.seed = seed;
                    row.construct_seconds = inst.construct_seconds;
                    try {
                        SvdResult r = run_solver(solver, inst.a, sc);
                        row.sweeps = r.report.sweeps;
                        row.residual = r.report.final_residual;
                        row.max_rank_v = static_cast<double>(r.v.max_rank());
                        row.termination = to_string(r.report.termination);
                        row.seconds = r.report.seconds;
                        if (inst.truth && inst.truth->size() >= r.sigma.size()) {
                            row.spectrum_error = spectrum_error(r.sigma, *inst.truth);
                        }
                        if (require_convergence && r.report.termination == Termination::sweep_limit) ++out.unconverged;
                    } catch (const Error& e) {
                        ++out.failures;
                        if (progress) progress("warning: " + solver + " failed at N=" + std::to_string(row.n) + ": " + e.what());
                        continue;
                    }
                    if (progress) {
                        char buf[256];
                        std::snprintf(buf, sizeof buf, "%s %s N=%d %s=%s rep=%d residual=%.3e sweeps=%g %s (%.2fs)",
                                      row.experiment.c_str(), solver.c_str(), row.n,
                                      row.param_name.empty() ? "param" : row.param_name.c_str(),
                                      format_param(param).c_str(), rep, row.residual, row.sweeps,
                                      row.termination.c_str(), row.seconds);
                        progress(buf);
                    }
                    out.rows.push_back(std::move(row));
                }
            }
        }
    }
    // Canonical order: the solver order of the config within each (N, param, rep).
    std::vector<ResultRow> aggregates = aggregate_rows(out.rows);
    out.rows.insert(out.rows.end(), aggregates.begin(), aggregates.end());
    return out;
}

}  // namespace

double spectrum_error(const Vector& sigma, const Vector& truth) {
    const Vector t = truth.head(sigma.size());
    return (sigma - t).norm() / t.norm();
}

SvdResult run_solver(const std::string& name, const MatrixTT& a, const SolverConfig& cfg) {
    if (name == "als_svd") return als_svd(a, cfg);
    if (name == "mals_svd") return mals_svd(a, cfg);
    if (name == "als_eig") return als_eig(a, cfg);
    if (name == "mals_eig") return mals_eig(a, cfg);
    throw ConfigError("unknown solver '" + name + "'");
}

RunOutcome run_experiment(const RunConfig& cfg, const ProgressSink& progress) {
    validate(cfg);
    if (cfg.experiment == Experiment::toeplitz) return toeplitz_capped_rank_experiment(cfg, progress);
    return run_grid(cfg, true, progress);
}

RunOutcome toeplitz_capped_rank_experiment(const RunConfig& cfg, const ProgressSink& progress) {
    if (cfg.experiment != Experiment::toeplitz) throw ConfigError("toeplitz experiment expected");
    validate(cfg);
    return run_grid(cfg, false, progress);
}

std::vector<ResultRow> aggregate_rows(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::string, int, std::string, double, std::string>;
    std::vector<Key> order;
    std::map<Key, std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : rows) {
        if (r.aggregate()) continue;
        // NaN parameters compare unequal; map them to a sentinel for grouping.
        const double p = std::isnan(r.param) ? -1.0 : r.param;
        Key key{r.experiment, r.n, r.solver, p, r.param_name};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&r);
    }
    auto stats = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };
    std::vector<ResultRow> out;
    for (const Key& key : order) {
        const auto& g = groups[key];
        ResultRow agg = *g.front();
        agg.rep = -1;
        std::vector<double> sweeps, residual, seconds, construct, ranks, errors;
        bool same_termination = true;
        for (const ResultRow* r : g) {
            sweeps.push_back(r->sweeps);
            residual.push_back(r->residual);
            seconds.push_back(r->seconds);
            construct.push_back(r->construct_seconds);
            ranks.push_back(r->max_rank_v);
            if (r->spectrum_error) errors.push_back(*r->spectrum_error);
            same_termination = same_termination && r->termination == agg.termination;
        }
        agg.sweeps = stats(sweeps).first;
        std::tie(agg.residual, agg.residual_std) = stats(residual);
        std::tie(agg.seconds, agg.seconds_std) = stats(seconds);
        agg.construct_seconds = stats(construct).first;
        agg.max_rank_v = stats(ranks).first;
        if (errors.size() == g.size()) {
            auto [m, s] = stats(errors);
            agg.spectrum_error = m;
            agg.spectrum_error_std = s;
        } else {
            agg.spectrum_error.reset();
        }
        if (!same_termination) agg.termination = "mixed";
        out.push_back(std::move(agg));
    }
    return out;
}

}  // namespace ttsvd::harness
