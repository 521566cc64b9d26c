#include "ttsvd/structured.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "ttsvd/contract.hpp"
#include "ttsvd/errors.hpp"

namespace ttsvd {

namespace {

using Block2 = std::array<double, 4>;  // 2x2, column-major

constexpr Block2 kZ{0, 0, 0, 0};
constexpr Block2 kI{1, 0, 0, 1};
constexpr Block2 kJ{0, 0, 1, 0};  // (0,1) = 1
constexpr Block2 kK{0, 1, 0, 0};  // (1,0) = 1
constexpr Block2 kP{0, 1, 1, 0};
constexpr Block2 kQ{1, 0, 0, 0};
constexpr Block2 kR{0, 0, 0, 1};

Index pow2(int e) { return Index{1} << e; }

void require_binary(const VectorTT& s, const char* what) {
    for (Index m : s.mode_sizes()) {
        if (m != 2) throw ShapeError(std::string(what) + ": all mode sizes must be 2");
    }
    if (s.length() < 2) throw InvalidArgument(std::string(what) + ": at least two cores required");
}

// Block (q_next, q_prev) of the mixing matrix for core n of N (0-based), bit k.
// The triple (a, b, c) is (I, J, K) for Toeplitz and (P, Q, R) for Hankel.
const Block2& mixing_block(int n, int n_cores, int k, int q_next, int q_prev, const Block2& a, const Block2& b,
                           const Block2& c) {
    if (n == n_cores - 1) {  // one row: [a b] or [b 0]
        if (k == 0) return q_prev == 0 ? a : b;
        return q_prev == 0 ? b : kZ;
    }
    if (n == 0) {  // one column: [b; c] or [0; a]
        if (k == 0) return q_next == 0 ? b : c;
        return q_next == 0 ? kZ : a;
    }
    if (k == 0) {  // [[a, b], [0, c]]
        if (q_next == 0) return q_prev == 0 ? a : b;
        return q_prev == 0 ? kZ : c;
    }
    // [[b, 0], [c, a]]
    if (q_next == 0) return q_prev == 0 ? b : kZ;
    return q_prev == 0 ? c : a;
}

MatrixTT mixed_triangular(const VectorTT& s, const Block2& a, const Block2& b, const Block2& c) {
    const int n_cores = s.length();
    std::vector<DenseTensor> cores;
    for (int n = 0; n < n_cores; ++n) {
        const DenseTensor& sc = s.core(n);
        const Index rl = sc.extent(0), rr = sc.extent(2);
        const int ql = n == 0 ? 1 : 2;
        const int qr = n == n_cores - 1 ? 1 : 2;
        DenseTensor core({rl * ql, 2, 2, rr * qr});
        for (int k = 0; k < 2; ++k) {
            for (int qn = 0; qn < qr; ++qn) {
                for (int qp = 0; qp < ql; ++qp) {
                    const Block2& blk = mixing_block(n, n_cores, k, qn, qp, a, b, c);
                    for (Index r2 = 0; r2 < rr; ++r2) {
                        for (Index r1 = 0; r1 < rl; ++r1) {
                            const double w = sc({r1, k, r2});
                            if (w == 0.0) continue;
                            for (Index j = 0; j < 2; ++j)
                                for (Index i = 0; i < 2; ++i)
                                    core({r1 + rl * qp, i, j, r2 + rr * qn}) += w * blk[static_cast<std::size_t>(i + 2 * j)];
                        }
                    }
                }
            }
        }
        cores.push_back(std::move(core));
    }
    return MatrixTT(std::move(cores));
}

// Fixes the column bit of the last core to `j` and folds the core into its left
// neighbour, whose row mode grows to I_{N-1} * I_N.
MatrixTT fold_last_column(const MatrixTT& a, Index j) {
    std::vector<DenseTensor> cores = a.cores();
    const DenseTensor last = cores.back();
    cores.pop_back();
    const Index rl = last.extent(0), in = last.extent(1);
    DenseTensor slice({rl, in, 1});
    for (Index i = 0; i < in; ++i)
        for (Index r = 0; r < rl; ++r) slice({r, i, 0}) = last({r, i, j, 0});
    DenseTensor& prev = cores.back();
    // (R, I', J', r) x (r, I, 1) -> (R, I', J', I, 1) -> (R, I', I, J', 1)
    DenseTensor merged = contract_last_first(prev, slice).permuted({0, 1, 3, 2, 4});
    prev = std::move(merged).reshaped({prev.extent(0), prev.extent(1) * in, prev.extent(2), 1});
    return MatrixTT(std::move(cores));
}

// Fixes both bits of the last core and folds it into its left neighbour.
MatrixTT fold_last_entry(const MatrixTT& a, Index i0, Index j0) {
    std::vector<DenseTensor> cores = a.cores();
    const DenseTensor last = cores.back();
    cores.pop_back();
    const Index rl = last.extent(0);
    Matrix v(rl, 1);
    for (Index r = 0; r < rl; ++r) v(r, 0) = last({r, i0, j0, 0});
    DenseTensor& prev = cores.back();
    Matrix prod = gemm(prev.as_matrix(prev.size() / rl), v);
    prev = tensorize(Eigen::Map<const Vector>(prod.data(), prod.size()), {prev.extent(0), prev.extent(1), prev.extent(2), 1});
    return MatrixTT(std::move(cores));
}

VectorTT unit_vector_tt(int n) {
    std::vector<DenseTensor> cores;
    for (int k = 0; k < n; ++k) cores.push_back(DenseTensor({1, 2, 1}, {1.0, 0.0}));
    return VectorTT(std::move(cores));
}

DenseTensor normal_core(std::vector<Index> shape, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    DenseTensor c(std::move(shape));
    for (double& x : c.values()) x = dist(rng);
    return c;
}

}  // namespace

MatrixTT identity_tt(int n, Index mode) {
    if (n < 1) throw InvalidArgument("identity_tt: at least one core required");
    std::vector<DenseTensor> cores;
    for (int k = 0; k < n; ++k) {
        DenseTensor c({1, mode, mode, 1});
        for (Index i = 0; i < mode; ++i) c({0, i, i, 0}) = 1.0;
        cores.push_back(std::move(c));
    }
    return MatrixTT(std::move(cores));
}

VectorTT random_vector_tt(int n, Index rank, std::uint64_t seed) {
    if (n < 1 || rank < 1) throw InvalidArgument("random_vector_tt: need n >= 1 and rank >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Index> ranks(static_cast<std::size_t>(n) + 1, 1);
    for (int b = 1; b < n; ++b) ranks[static_cast<std::size_t>(b)] = std::min({rank, pow2(std::min(b, 40)), pow2(std::min(n - b, 40))});
    std::vector<DenseTensor> cores;
    for (int k = 0; k < n; ++k) {
        cores.push_back(normal_core({ranks[static_cast<std::size_t>(k)], 2, ranks[static_cast<std::size_t>(k) + 1]}, rng));
    }
    return left_orthogonalize(VectorTT(std::move(cores)), n - 1);
}

BlockTT random_block_tt(int n, Index k, Index rank, std::uint64_t seed) {
    if (n < 1 || k < 1 || rank < 1) throw InvalidArgument("random_block_tt: need n, k, rank >= 1");
    if (n < 40 && k > pow2(n)) throw InvalidArgument("random_block_tt: more columns than rows");
    std::vector<Index> ranks(static_cast<std::size_t>(n) + 1, 1);
    for (int b = 1; b < n; ++b) {
        const int right = n - b;
        const Index floor = right >= 40 ? 1 : (k + pow2(right) - 1) / pow2(right);
        const Index cap = pow2(std::min(b, 40));
        ranks[static_cast<std::size_t>(b)] = std::clamp(rank, std::min(floor, cap), cap);
    }
    return random_block_tt(std::vector<Index>(static_cast<std::size_t>(n), 2), ranks, k, seed);
}

BlockTT random_block_tt(const std::vector<Index>& modes, const std::vector<Index>& ranks, Index k,
                        std::uint64_t seed) {
    const int n = static_cast<int>(modes.size());
    if (n < 1 || ranks.size() != modes.size() + 1 || ranks.front() != 1 || ranks.back() != 1) {
        throw InvalidArgument("random_block_tt: need N modes and N+1 ranks with unit boundaries");
    }
    std::mt19937_64 rng(seed);
    std::vector<DenseTensor> cores;
    for (int c = 0; c + 1 < n; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        cores.push_back(normal_core({ranks[cu], modes[cu], ranks[cu + 1]}, rng));
    }
    const Index in = modes.back();
    cores.push_back(local_to_block_core(normal_core({ranks[static_cast<std::size_t>(n) - 1], in, 1, k}, rng)));
    // Orthonormal local columns make the whole block orthonormal once the
    // leading cores are left-orthogonal.
    BlockTT u = left_orthogonalize(BlockTT(std::move(cores), n - 1), n - 1);
    std::vector<DenseTensor> out = u.cores();
    std::vector<Orth> tags = u.tags();
    DenseTensor local = block_core_to_local(out.back());
    const Index rb = local.extent(0);
    QrFactors qr = dense_qr(local.as_matrix(rb * in));
    if (qr.q.cols() < k) throw InvalidArgument("random_block_tt: local space smaller than K");
    out.back() = local_to_block_core(tensorize(Eigen::Map<const Vector>(qr.q.data(), qr.q.size()), {rb, in, 1, k}));
    return BlockTT(std::move(out), n - 1, std::move(tags));
}

MatrixTT random_matrix_tt(int n, Index rank, std::uint64_t seed) {
    if (n < 1 || rank < 1) throw InvalidArgument("random_matrix_tt: need n >= 1 and rank >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Index> ranks(static_cast<std::size_t>(n) + 1, 1);
    for (int b = 1; b < n; ++b) {
        ranks[static_cast<std::size_t>(b)] = std::min({rank, pow2(std::min(2 * b, 40)), pow2(std::min(2 * (n - b), 40))});
    }
    std::vector<DenseTensor> cores;
    for (int k = 0; k < n; ++k) {
        cores.push_back(normal_core({ranks[static_cast<std::size_t>(k)], 2, 2, ranks[static_cast<std::size_t>(k) + 1]}, rng));
    }
    return MatrixTT(std::move(cores));
}

MatrixTT toeplitz_tt(const VectorTT& s) {
    require_binary(s, "toeplitz_tt");
    return mixed_triangular(s, kI, kJ, kK);
}

MatrixTT hankel_tt(const VectorTT& s) {
    require_binary(s, "hankel_tt");
    return mixed_triangular(s, kP, kQ, kR);
}

MatrixTT full_toeplitz_tt(const VectorTT& x) {
    require_binary(x, "full_toeplitz_tt");
    const int n_cores = x.length() - 1;
    if (n_cores < 1) throw InvalidArgument("full_toeplitz_tt: x needs at least two cores");
    // Index 2^N - 1 + i - j = i + (2^N - 1 - j): binary addition of i and the
    // complemented j, carried bit by bit; the final carry is the top bit of x.
    std::vector<DenseTensor> cores;
    for (int n = 0; n < n_cores; ++n) {
        const DenseTensor& xc = x.core(n);
        const Index rl = xc.extent(0), rr = xc.extent(2);
        const int cl = n == 0 ? 1 : 2;
        DenseTensor core({rl * cl, 2, 2, rr * 2});
        for (int cin = 0; cin < cl; ++cin)
            for (Index j = 0; j < 2; ++j)
                for (Index i = 0; i < 2; ++i) {
                    const Index total = i + (1 - j) + cin;
                    const Index k = total % 2;
                    const Index cout = total / 2;
                    for (Index r2 = 0; r2 < rr; ++r2)
                        for (Index r1 = 0; r1 < rl; ++r1)
                            core({r1 + rl * cin, i, j, r2 + rr * cout}) = xc({r1, k, r2});
                }
        cores.push_back(std::move(core));
    }
    // Close the chain with the top core of x selected by the final carry.
    const DenseTensor& top = x.core(n_cores);
    const Index rt = top.extent(0);
    Matrix closing(2 * rt, 1);
    for (Index c = 0; c < 2; ++c)
        for (Index r = 0; r < rt; ++r) closing(r + rt * c, 0) = top({r, c, 0});
    DenseTensor& last = cores.back();
    Matrix prod = gemm(last.as_matrix(last.size() / (2 * rt)), closing);
    last = tensorize(Eigen::Map<const Vector>(prod.data(), prod.size()), {last.extent(0), 2, 2, 1});
    return MatrixTT(std::move(cores));
}

MatrixTT hankel_submatrix_tt(const VectorTT& s) {
    require_binary(s, "hankel_submatrix_tt");
    return fold_last_column(hankel_tt(s), 0);
}

HilbertTT hilbert_submatrix_tt(int n, double delta, int max_n) {
    if (n < 2) throw InvalidArgument("hilbert_submatrix_tt: N must be at least 2");
    if (n > max_n) {
        throw BudgetError("hilbert_submatrix_tt: N = " + std::to_string(n) + " exceeds the dense generator cap of " +
                          std::to_string(max_n));
    }
    // s(m) = 1/(2^{N+1} - 1 - m) for m < 2^{N+1} - 1, so that the (N+1)-level
    // Hankel entry s(2^{N+1} - 2 - i - j) equals 1/(i + j + 1). The generator is
    // compressed in reversed order w(m) = s(2^{N+1} - 1 - m), which flips every bit.
    const int levels = n + 1;
    const Index len = pow2(levels);
    std::vector<double> w(static_cast<std::size_t>(len));
    w[0] = 1.0;
    for (Index m = 1; m < len; ++m) w[static_cast<std::size_t>(m)] = 1.0 / static_cast<double>(m);
    VectorTT wt = tt_svd_compress(DenseTensor(std::vector<Index>(static_cast<std::size_t>(levels), 2), std::move(w)), delta);
    std::vector<Index> generator_ranks = wt.ranks();
    std::vector<DenseTensor> cores = std::move(wt).release();
    for (DenseTensor& c : cores) {
        DenseTensor flipped(c.shape());
        for (Index r2 = 0; r2 < c.extent(2); ++r2)
            for (Index i = 0; i < 2; ++i)
                for (Index r1 = 0; r1 < c.extent(0); ++r1) flipped({r1, i, r2}) = c({r1, 1 - i, r2});
        c = std::move(flipped);
    }
    MatrixTT h = hankel_tt(VectorTT(std::move(cores)));
    MatrixTT square = fold_last_entry(h, 0, 0);
    return {fold_last_column(square, 0), std::move(generator_ranks)};
}

MatrixTT shift_tt(int n) {
    if (n < 2) throw InvalidArgument("shift_tt: N must be at least 2");
    return toeplitz_tt(unit_vector_tt(n));
}

MatrixTT shift_transpose_tt(int n) { return matrix_tt_transpose(shift_tt(n)); }

MatrixTT tridiagonal_tt(const VectorTT& a, const VectorTT& b, const VectorTT& c, double round_delta) {
    require_binary(a, "tridiagonal_tt");
    require_binary(b, "tridiagonal_tt");
    require_binary(c, "tridiagonal_tt");
    if (a.length() != b.length() || b.length() != c.length()) {
        throw ShapeError("tridiagonal_tt: diagonals must have equal lengths");
    }
    const int n = a.length();
    MatrixTT lower = matrix_tt_multiply(shift_transpose_tt(n), diag_embed(a));
    MatrixTT upper = matrix_tt_multiply(shift_tt(n), diag_embed(c));
    MatrixTT sum = matrix_tt_add(matrix_tt_add(lower, diag_embed(b)), upper);
    return matrix_tt_round(sum, round_delta);
}

PrescribedSvd prescribed_svd_matrix(int n, double beta, Index k0, Index rank, std::uint64_t seed) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("prescribed_svd_matrix: beta must lie in (0, 1)");
    if (n < 2) throw InvalidArgument("prescribed_svd_matrix: N must be at least 2");
    PrescribedSvd out;
    out.u0 = random_block_tt(n, k0, rank, seed);
    out.v0 = random_block_tt(n, k0, rank, seed ^ 0x9e3779b97f4a7c15ULL);
    out.spectrum.resize(k0);
    for (Index k = 0; k < k0; ++k) out.spectrum[k] = std::pow(beta, static_cast<double>(k));

    std::vector<DenseTensor> cores;
    for (int c = 0; c + 1 < n; ++c) {
        const DenseTensor& u = out.u0.core(c);
        const DenseTensor& v = out.v0.core(c);
        // (a, i, a') x (b, j, b') -> (a, i, a', b, j, b') -> (a, b, i, j, a', b')
        DenseTensor kron = contract(u, std::span<const int>{}, v, std::span<const int>{}).permuted({0, 3, 1, 4, 2, 5});
        cores.push_back(std::move(kron).reshaped(
            {u.extent(0) * v.extent(0), u.extent(1), v.extent(1), u.extent(2) * v.extent(2)}));
    }
    // Last core: sum_k sigma_k U(a, k, i) V(b, k, j).
    const DenseTensor& ub = out.u0.core(n - 1);
    const DenseTensor& vb = out.v0.core(n - 1);
    DenseTensor us = ub;
    const Index ra = ub.extent(0), rb = vb.extent(0);
    for (Index i = 0; i < ub.extent(2); ++i)
        for (Index k = 0; k < k0; ++k)
            for (Index a = 0; a < ra; ++a) us({a, k, i, 0}) *= out.spectrum[k];
    // (a, k, i, 1) . (b, k, j, 1) over k -> (a, i, 1, b, j, 1) -> (a, b, i, j)
    DenseTensor last = contract(us, {1}, vb, {1}).permuted({0, 3, 1, 4, 2, 5});
    cores.push_back(std::move(last).reshaped({ra * rb, ub.extent(2), vb.extent(2), 1}));
    out.a = MatrixTT(std::move(cores));
    return out;
}

}  // namespace ttsvd
