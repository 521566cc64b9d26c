#include "ttsvd/tt.hpp"

#include <algorithm>
#include <string>

#include "ttsvd/contract.hpp"
#include "ttsvd/errors.hpp"

namespace ttsvd {

namespace {

std::string at(int n) { return " (core " + std::to_string(n) + ")"; }

void check_chain(const std::vector<DenseTensor>& cores, int block, const char* what) {
    const int n_cores = static_cast<int>(cores.size());
    if (n_cores == 0) throw ShapeError(std::string(what) + ": empty chain");
    Index prev = 1;
    for (int n = 0; n < n_cores; ++n) {
        const DenseTensor& c = cores[static_cast<std::size_t>(n)];
        const int expected = n == block ? 4 : 3;
        if (c.order() != expected) {
            throw ShapeError(std::string(what) + ": core has order " + std::to_string(c.order()) + ", expected " +
                             std::to_string(expected) + at(n));
        }
        for (Index e : c.shape()) {
            if (e <= 0) throw ShapeError(std::string(what) + ": non-positive extent" + at(n));
        }
        if (c.extent(0) != prev) {
            throw ShapeError(std::string(what) + ": bond mismatch " + std::to_string(prev) + " vs " +
                             std::to_string(c.extent(0)) + at(n));
        }
        prev = c.extent(c.order() - 1);
    }
    if (prev != 1) throw ShapeError(std::string(what) + ": last bond rank must be 1");
}

void check_matrix_chain(const std::vector<DenseTensor>& cores) {
    if (cores.empty()) throw ShapeError("MatrixTT: empty chain");
    Index prev = 1;
    for (std::size_t n = 0; n < cores.size(); ++n) {
        const DenseTensor& c = cores[n];
        if (c.order() != 4) throw ShapeError("MatrixTT: cores must be 4th-order" + at(static_cast<int>(n)));
        for (Index e : c.shape()) {
            if (e <= 0) throw ShapeError("MatrixTT: non-positive extent" + at(static_cast<int>(n)));
        }
        if (c.extent(0) != prev) throw ShapeError("MatrixTT: bond mismatch" + at(static_cast<int>(n)));
        prev = c.extent(3);
    }
    if (prev != 1) throw ShapeError("MatrixTT: last bond rank must be 1");
}

std::vector<Index> chain_ranks(const std::vector<DenseTensor>& cores) {
    std::vector<Index> r;
    if (cores.empty()) return r;
    r.push_back(cores.front().extent(0));
    for (const DenseTensor& c : cores) r.push_back(c.extent(c.order() - 1));
    return r;
}

Index max_of(const std::vector<Index>& v) { return v.empty() ? 0 : *std::max_element(v.begin(), v.end()); }

void check_budget(Index entries, Index budget) {
    if (entries > budget) {
        throw BudgetError("materializing " + std::to_string(entries) + " entries exceeds the budget of " +
                          std::to_string(budget));
    }
}

// Q R of the (all-but-last) x last unfolding; the core becomes Q.
Matrix left_qr_step(DenseTensor& core) {
    const Index rr = core.extent(core.order() - 1);
    const Index rows = core.size() / rr;
    QrFactors qr = dense_qr(core.as_matrix(rows));
    std::vector<Index> shape = core.shape();
    shape.back() = qr.q.cols();
    core = DenseTensor(shape, std::vector<double>(qr.q.data(), qr.q.data() + qr.q.size()));
    return std::move(qr.r);
}

// core = L Q with Q having orthonormal rows in the first x (rest) unfolding; returns L.
Matrix right_qr_step(DenseTensor& core) {
    const Index rl = core.extent(0);
    const Matrix m = core.as_matrix(rl);
    QrFactors qr = dense_qr(m.transpose());
    Matrix qt = qr.q.transpose();
    std::vector<Index> shape = core.shape();
    shape.front() = qt.rows();
    core = DenseTensor(shape, std::vector<double>(qt.data(), qt.data() + qt.size()));
    return qr.r.transpose();
}

// next <- r * next over the first mode.
void push_left_factor(const Matrix& r, DenseTensor& next) {
    const Index rl = next.extent(0);
    Matrix prod = gemm(r, next.as_matrix(rl));
    std::vector<Index> shape = next.shape();
    shape.front() = r.rows();
    next = DenseTensor(shape, std::vector<double>(prod.data(), prod.data() + prod.size()));
}

// prev <- prev * l over the last mode.
void push_right_factor(DenseTensor& prev, const Matrix& l) {
    const Index rr = prev.extent(prev.order() - 1);
    Matrix prod = gemm(prev.as_matrix(prev.size() / rr), l);
    std::vector<Index> shape = prev.shape();
    shape.back() = l.cols();
    prev = DenseTensor(shape, std::vector<double>(prod.data(), prod.data() + prod.size()));
}

// One exact step of the block towards the right or left.
void step_block(std::vector<DenseTensor>& cores, std::vector<Orth>& tags, int& block, SplitDirection dir) {
    auto b = static_cast<std::size_t>(block);
    DenseTensor local = block_core_to_local(cores[b]);
    const Index rl = local.extent(0);
    const Index i = local.extent(1);
    const Index rr = local.extent(2);
    const Index k = local.extent(3);
    if (dir == SplitDirection::right) {
        QrFactors qr = dense_qr(local.as_matrix(rl * i));
        const Index r = qr.q.cols();
        cores[b] = tensorize(Eigen::Map<const Vector>(qr.q.data(), qr.q.size()), {rl, i, r});
        DenseTensor carrier =
            tensorize(Eigen::Map<const Vector>(qr.r.data(), qr.r.size()), {r, rr, k}).permuted({0, 2, 1});
        cores[b + 1] = absorb_carrier(carrier, cores[b + 1], SplitDirection::right);
        tags[b] = Orth::left;
        tags[b + 1] = Orth::none;
        ++block;
    } else {
        Matrix m = matricize(local, {0, 3});
        QrFactors qr = dense_qr(m.transpose());
        const Index r = qr.q.cols();
        Matrix qt = qr.q.transpose();
        cores[b] = tensorize(Eigen::Map<const Vector>(qt.data(), qt.size()), {r, i, rr});
        Matrix lt = qr.r.transpose();
        DenseTensor carrier = tensorize(Eigen::Map<const Vector>(lt.data(), lt.size()), {rl, k, r});
        cores[b - 1] = absorb_carrier(carrier, cores[b - 1], SplitDirection::left);
        tags[b] = Orth::right;
        tags[b - 1] = Orth::none;
        --block;
    }
}

template <class Chain>
void check_position(const Chain& x, int p, const char* what) {
    if (p < 0 || p >= x.length()) {
        throw InvalidArgument(std::string(what) + ": position " + std::to_string(p) + " outside [0, " +
                              std::to_string(x.length()) + ")");
    }
}

}  // namespace

// ---- VectorTT ----

VectorTT::VectorTT(std::vector<DenseTensor> cores)
    : VectorTT(std::move(cores), {}) {}

VectorTT::VectorTT(std::vector<DenseTensor> cores, std::vector<Orth> tags)
    : cores_(std::move(cores)), tags_(std::move(tags)) {
    check_chain(cores_, -1, "VectorTT");
    if (tags_.empty()) tags_.assign(cores_.size(), Orth::none);
    if (tags_.size() != cores_.size()) throw ShapeError("VectorTT: one orthogonality tag per core required");
}

std::vector<Index> VectorTT::ranks() const { return chain_ranks(cores_); }

std::vector<Index> VectorTT::mode_sizes() const {
    std::vector<Index> s;
    for (const DenseTensor& c : cores_) s.push_back(c.extent(1));
    return s;
}

Index VectorTT::max_rank() const { return max_of(ranks()); }

// ---- MatrixTT ----

MatrixTT::MatrixTT(std::vector<DenseTensor> cores) : cores_(std::move(cores)) { check_matrix_chain(cores_); }

std::vector<Index> MatrixTT::ranks() const { return chain_ranks(cores_); }

std::vector<Index> MatrixTT::row_sizes() const {
    std::vector<Index> s;
    for (const DenseTensor& c : cores_) s.push_back(c.extent(1));
    return s;
}

std::vector<Index> MatrixTT::col_sizes() const {
    std::vector<Index> s;
    for (const DenseTensor& c : cores_) s.push_back(c.extent(2));
    return s;
}

Index MatrixTT::rows() const { return product(row_sizes()); }
Index MatrixTT::cols() const { return product(col_sizes()); }
Index MatrixTT::max_rank() const { return max_of(ranks()); }

// ---- BlockTT ----

BlockTT::BlockTT(std::vector<DenseTensor> cores, int block_position)
    : BlockTT(std::move(cores), block_position, {}) {}

BlockTT::BlockTT(std::vector<DenseTensor> cores, int block_position, std::vector<Orth> tags)
    : cores_(std::move(cores)), tags_(std::move(tags)), block_(block_position) {
    if (block_ < 0 || block_ >= static_cast<int>(cores_.size())) {
        throw ShapeError("BlockTT: block position outside the chain");
    }
    check_chain(cores_, block_, "BlockTT");
    if (tags_.empty()) tags_.assign(cores_.size(), Orth::none);
    if (tags_.size() != cores_.size()) throw ShapeError("BlockTT: one orthogonality tag per core required");
}

Index BlockTT::block_size() const { return cores_.at(static_cast<std::size_t>(block_)).extent(1); }

std::vector<Index> BlockTT::ranks() const { return chain_ranks(cores_); }

std::vector<Index> BlockTT::mode_sizes() const {
    std::vector<Index> s;
    for (int n = 0; n < length(); ++n) s.push_back(core(n).extent(n == block_ ? 2 : 1));
    return s;
}

Index BlockTT::max_rank() const { return max_of(ranks()); }

// ---- orthogonality checks ----

bool is_left_orthogonal(const DenseTensor& core, double tol) {
    const Index rr = core.extent(core.order() - 1);
    auto m = core.as_matrix(core.size() / rr);
    return (m.transpose() * m - Matrix::Identity(rr, rr)).norm() <= tol * std::sqrt(static_cast<double>(rr));
}

bool is_right_orthogonal(const DenseTensor& core, double tol) {
    const Index rl = core.extent(0);
    auto m = core.as_matrix(rl);
    return (m * m.transpose() - Matrix::Identity(rl, rl)).norm() <= tol * std::sqrt(static_cast<double>(rl));
}

// ---- construction ----

VectorTT tt_svd_compress(const DenseTensor& t, double delta) {
    if (!(delta >= 0.0)) throw InvalidArgument("tt_svd_compress: delta must be nonnegative");
    const int n_modes = t.order();
    if (n_modes < 1) throw ShapeError("tt_svd_compress: tensor must have at least one mode");
    TruncationOptions opts;
    opts.drop_numerical_zeros = true;
    std::vector<DenseTensor> cores;
    std::vector<Orth> tags;
    Matrix c = t.as_matrix(1);
    Index r_prev = 1;
    for (int n = 0; n + 1 < n_modes; ++n) {
        const Index in = t.extent(n);
        const Index rows = r_prev * in;
        Eigen::Map<const Matrix> unfold(c.data(), rows, c.size() / rows);
        SvdFactors f = truncated_svd(unfold, delta, opts);
        const Index r = f.rank();
        cores.push_back(tensorize(Eigen::Map<const Vector>(f.u.data(), f.u.size()), {r_prev, in, r}));
        tags.push_back(Orth::left);
        c = f.s.asDiagonal() * f.v.transpose();
        r_prev = r;
    }
    cores.push_back(tensorize(Eigen::Map<const Vector>(c.data(), c.size()), {r_prev, t.extent(n_modes - 1), 1}));
    tags.push_back(Orth::none);
    return VectorTT(std::move(cores), std::move(tags));
}

MatrixTT matrix_tt_from_dense(const Matrix& m, const std::vector<Index>& row_sizes,
                              const std::vector<Index>& col_sizes, double delta) {
    if (row_sizes.size() != col_sizes.size() || row_sizes.empty()) {
        throw ShapeError("matrix_tt_from_dense: row and column mode lists must have equal nonzero length");
    }
    if (product(row_sizes) != m.rows() || product(col_sizes) != m.cols()) {
        throw ShapeError("matrix_tt_from_dense: mode sizes do not match the matrix");
    }
    const int n_modes = static_cast<int>(row_sizes.size());
    std::vector<Index> shape(row_sizes);
    shape.insert(shape.end(), col_sizes.begin(), col_sizes.end());
    DenseTensor t(shape, std::vector<double>(m.data(), m.data() + m.size()));
    std::vector<int> perm;
    std::vector<Index> merged;
    for (int n = 0; n < n_modes; ++n) {
        perm.push_back(n);
        perm.push_back(n_modes + n);
        merged.push_back(row_sizes[static_cast<std::size_t>(n)] * col_sizes[static_cast<std::size_t>(n)]);
    }
    VectorTT v = tt_svd_compress(t.permuted(perm).reshaped(merged), delta);
    std::vector<DenseTensor> cores = std::move(v).release();
    for (int n = 0; n < n_modes; ++n) {
        DenseTensor& c = cores[static_cast<std::size_t>(n)];
        c = std::move(c).reshaped({c.extent(0), row_sizes[static_cast<std::size_t>(n)],
                                   col_sizes[static_cast<std::size_t>(n)], c.extent(2)});
    }
    return MatrixTT(std::move(cores));
}

DenseTensor tt_reconstruct(const VectorTT& x, Index budget) {
    const std::vector<Index> modes = x.mode_sizes();
    check_budget(product(modes), budget);
    DenseTensor cur({1, 1}, {1.0});
    for (const DenseTensor& c : x.cores()) {
        DenseTensor next = contract(cur, {1}, c, {0});
        cur = std::move(next).reshaped({next.extent(0) * next.extent(1), next.extent(2)});
    }
    return std::move(cur).reshaped(modes);
}

Matrix tt_reconstruct(const MatrixTT& a, Index budget) {
    check_budget(a.rows() * a.cols(), budget);
    DenseTensor cur({1, 1, 1}, {1.0});
    for (const DenseTensor& c : a.cores()) {
        DenseTensor next = contract(cur, {2}, c, {0}).permuted({0, 2, 1, 3, 4});
        cur = std::move(next).reshaped(
            {next.extent(0) * next.extent(1), next.extent(2) * next.extent(3), next.extent(4)});
    }
    return cur.as_matrix(cur.extent(0));
}

Matrix tt_reconstruct(const BlockTT& u, Index budget) {
    check_budget(product(u.mode_sizes()) * u.block_size(), budget);
    DenseTensor cur({1, 1, 1}, {1.0});
    for (int n = 0; n < u.length(); ++n) {
        const DenseTensor& c = u.core(n);
        if (n == u.block_position()) {
            DenseTensor next = contract(cur, {2}, c, {0}).permuted({0, 3, 1, 2, 4});
            cur = std::move(next).reshaped(
                {next.extent(0) * next.extent(1), next.extent(2) * next.extent(3), next.extent(4)});
        } else {
            DenseTensor next = contract(cur, {2}, c, {0}).permuted({0, 2, 1, 3});
            cur = std::move(next).reshaped({next.extent(0) * next.extent(1), next.extent(2), next.extent(3)});
        }
    }
    return cur.as_matrix(cur.extent(0));
}

// ---- orthogonalization ----

VectorTT left_orthogonalize(const VectorTT& x, int p) {
    check_position(x, p, "left_orthogonalize");
    std::vector<DenseTensor> cores = x.cores();
    std::vector<Orth> tags = x.tags();
    int start = 0;
    while (start < p && tags[static_cast<std::size_t>(start)] == Orth::left) ++start;
    for (int n = start; n < p; ++n) {
        auto nu = static_cast<std::size_t>(n);
        Matrix r = left_qr_step(cores[nu]);
        push_left_factor(r, cores[nu + 1]);
        tags[nu] = Orth::left;
        tags[nu + 1] = Orth::none;
    }
    return VectorTT(std::move(cores), std::move(tags));
}

VectorTT right_orthogonalize(const VectorTT& x, int p) {
    check_position(x, p, "right_orthogonalize");
    std::vector<DenseTensor> cores = x.cores();
    std::vector<Orth> tags = x.tags();
    int start = x.length() - 1;
    while (start > p && tags[static_cast<std::size_t>(start)] == Orth::right) --start;
    for (int n = start; n > p; --n) {
        auto nu = static_cast<std::size_t>(n);
        Matrix l = right_qr_step(cores[nu]);
        push_right_factor(cores[nu - 1], l);
        tags[nu] = Orth::right;
        tags[nu - 1] = Orth::none;
    }
    return VectorTT(std::move(cores), std::move(tags));
}

BlockTT left_orthogonalize(const BlockTT& x, int p) {
    check_position(x, p, "left_orthogonalize");
    std::vector<DenseTensor> cores = x.cores();
    std::vector<Orth> tags = x.tags();
    int block = x.block_position();
    const int stop = std::min(p, block);
    int start = 0;
    while (start < stop && tags[static_cast<std::size_t>(start)] == Orth::left) ++start;
    for (int n = start; n < stop; ++n) {
        auto nu = static_cast<std::size_t>(n);
        Matrix r = left_qr_step(cores[nu]);
        push_left_factor(r, cores[nu + 1]);
        tags[nu] = Orth::left;
        tags[nu + 1] = Orth::none;
    }
    while (block < p) step_block(cores, tags, block, SplitDirection::right);
    return BlockTT(std::move(cores), block, std::move(tags));
}

BlockTT right_orthogonalize(const BlockTT& x, int p) {
    check_position(x, p, "right_orthogonalize");
    std::vector<DenseTensor> cores = x.cores();
    std::vector<Orth> tags = x.tags();
    int block = x.block_position();
    const int stop = std::max(p, block);
    int start = x.length() - 1;
    while (start > stop && tags[static_cast<std::size_t>(start)] == Orth::right) --start;
    for (int n = start; n > stop; --n) {
        auto nu = static_cast<std::size_t>(n);
        Matrix l = right_qr_step(cores[nu]);
        push_right_factor(cores[nu - 1], l);
        tags[nu] = Orth::right;
        tags[nu - 1] = Orth::none;
    }
    while (block > p) step_block(cores, tags, block, SplitDirection::left);
    return BlockTT(std::move(cores), block, std::move(tags));
}

BlockTT move_block(const BlockTT& x, int target) {
    check_position(x, target, "move_block");
    std::vector<DenseTensor> cores = x.cores();
    std::vector<Orth> tags = x.tags();
    int block = x.block_position();
    while (block < target) step_block(cores, tags, block, SplitDirection::right);
    while (block > target) step_block(cores, tags, block, SplitDirection::left);
    return BlockTT(std::move(cores), block, std::move(tags));
}

}  // namespace ttsvd
