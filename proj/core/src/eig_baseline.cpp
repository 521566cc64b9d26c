#include <cmath>

#include "engine.hpp"
#include "ttsvd/errors.hpp"

namespace ttsvd {

namespace {

// Exact products of A^T A carry rank R_A^2; rounding at this level only
// removes numerically redundant directions.
constexpr double kGramRoundDelta = 1e-13;

SvdResult eig_route(const MatrixTT& a, const SolverConfig& cfg, detail::Method method, const char* name) {
    validate(cfg, a.length(), method == detail::Method::als);
    const double round_delta = cfg.residual_round_factor * cfg.epsilon;
    const MatrixTT gram = matrix_tt_round(matrix_tt_multiply(matrix_tt_transpose(a), a), kGramRoundDelta);

    // ||A^T A V Sigma^+ - V Sigma|| / ||Sigma||
    auto stop = [&](const BlockTT&, const BlockTT& v, const Vector& s) {
        const double norm = s.norm();
        if (!(norm > 0.0)) return std::numeric_limits<double>::infinity();
        Vector pinv(s.size());
        for (Index k = 0; k < s.size(); ++k) pinv[k] = s[k] > 1e-14 * s[0] ? 1.0 / s[k] : 0.0;
        VectorTT mv = tt_round(block_as_vector(block_scale_columns(block_tt_matvec(gram, v), pinv)), round_delta);
        VectorTT vs = block_as_vector(block_scale_columns(v, -s));
        return tt_norm(tt_add(mv, vs)) / norm;
    };
    SvdResult res = detail::run_sweeps(gram, method, detail::Mode::eig, cfg, stop, {}, name);

    const Vector& s = res.sigma;
    if (s.size() == 0 || !(s[s.size() - 1] > 1e-14 * s[0])) {
        throw InvalidArgument(std::string(name) +
                              ": Sigma is numerically singular; the A A^T route this would need is not provided");
    }
    const BlockTT av = block_tt_matvec(a, res.v);
    res.u = vector_as_block(tt_round(block_as_vector(block_scale_columns(av, s.cwiseInverse())), round_delta),
                            s.size());
    res.report.final_residual = residual(a, res.u, res.v, s, round_delta);
    res.report.ranks_u = res.u.ranks();
    return res;
}

}  // namespace

SvdResult als_eig(const MatrixTT& a, const SolverConfig& cfg) {
    return eig_route(a, cfg, detail::Method::als, "als_eig");
}

SvdResult mals_eig(const MatrixTT& a, const SolverConfig& cfg) {
    return eig_route(a, cfg, detail::Method::mals, "mals_eig");
}

}  // namespace ttsvd
