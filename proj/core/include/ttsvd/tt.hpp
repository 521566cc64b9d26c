#pragma once

#include <cstdint>
#include <vector>

#include "ttsvd/dense.hpp"

namespace ttsvd {

enum class Orth : std::uint8_t { none = 0, left = 1, right = 2 };

/// Chain of 3rd-order cores (R_{n-1}, I_n, R_n) with boundary ranks 1.
class VectorTT {
public:
    VectorTT() = default;
    explicit VectorTT(std::vector<DenseTensor> cores);
    VectorTT(std::vector<DenseTensor> cores, std::vector<Orth> tags);

    [[nodiscard]] int length() const noexcept { return static_cast<int>(cores_.size()); }
    [[nodiscard]] const DenseTensor& core(int n) const { return cores_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
    [[nodiscard]] Orth tag(int n) const { return tags_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] const std::vector<Orth>& tags() const noexcept { return tags_; }
    /// R_0, ..., R_N.
    [[nodiscard]] std::vector<Index> ranks() const;
    [[nodiscard]] std::vector<Index> mode_sizes() const;
    [[nodiscard]] Index max_rank() const;

    std::vector<DenseTensor> release() && { return std::move(cores_); }

private:
    std::vector<DenseTensor> cores_;
    std::vector<Orth> tags_;
};

/// Chain of 4th-order cores (R_{n-1}, I_n, J_n, R_n). Row multi-index over the
/// I modes, column multi-index over the J modes, both column-major.
class MatrixTT {
public:
    MatrixTT() = default;
    explicit MatrixTT(std::vector<DenseTensor> cores);

    [[nodiscard]] int length() const noexcept { return static_cast<int>(cores_.size()); }
    [[nodiscard]] const DenseTensor& core(int n) const { return cores_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
    [[nodiscard]] std::vector<Index> ranks() const;
    [[nodiscard]] std::vector<Index> row_sizes() const;
    [[nodiscard]] std::vector<Index> col_sizes() const;
    [[nodiscard]] Index rows() const;
    [[nodiscard]] Index cols() const;
    [[nodiscard]] Index max_rank() const;

    std::vector<DenseTensor> release() && { return std::move(cores_); }

private:
    std::vector<DenseTensor> cores_;
};

/// TT chain representing K vectors: core `block_position` is 4th-order
/// (R_{n-1}, K, I_n, R_n), all others are 3rd-order. Realizes a
/// (prod I_n) x K matrix.
class BlockTT {
public:
    BlockTT() = default;
    BlockTT(std::vector<DenseTensor> cores, int block_position);
    BlockTT(std::vector<DenseTensor> cores, int block_position, std::vector<Orth> tags);

    [[nodiscard]] int length() const noexcept { return static_cast<int>(cores_.size()); }
    [[nodiscard]] int block_position() const noexcept { return block_; }
    [[nodiscard]] Index block_size() const;
    [[nodiscard]] const DenseTensor& core(int n) const { return cores_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
    [[nodiscard]] Orth tag(int n) const { return tags_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] const std::vector<Orth>& tags() const noexcept { return tags_; }
    [[nodiscard]] std::vector<Index> ranks() const;
    [[nodiscard]] std::vector<Index> mode_sizes() const;
    [[nodiscard]] Index max_rank() const;

    std::vector<DenseTensor> release() && { return std::move(cores_); }

private:
    std::vector<DenseTensor> cores_;
    std::vector<Orth> tags_;
    int block_ = 0;
};

/// True when the core's (R_{n-1} I_n) x R_n unfolding has orthonormal columns.
bool is_left_orthogonal(const DenseTensor& core, double tol = 1e-10);
/// True when the core's R_{n-1} x (I_n R_n) unfolding has orthonormal rows.
bool is_right_orthogonal(const DenseTensor& core, double tol = 1e-10);

// ---- construction and materialization ----

/// TT-SVD: successive delta-truncated SVDs of the sequential unfoldings. All
/// cores but the last are left-orthogonal.
VectorTT tt_svd_compress(const DenseTensor& t, double delta);
/// Matrix TT of a dense matrix whose row and column indices split into the given mode sizes.
MatrixTT matrix_tt_from_dense(const Matrix& m, const std::vector<Index>& row_sizes,
                              const std::vector<Index>& col_sizes, double delta);

inline constexpr Index default_materialize_budget = Index{1} << 26;

DenseTensor tt_reconstruct(const VectorTT& x, Index budget = default_materialize_budget);
/// (prod I_n) x (prod J_n) dense matrix.
Matrix tt_reconstruct(const MatrixTT& a, Index budget = default_materialize_budget);
/// (prod I_n) x K dense matrix.
Matrix tt_reconstruct(const BlockTT& u, Index budget = default_materialize_budget);

// ---- orthogonalization ----

/// Cores [0, p) become left-orthogonal; the realized value is unchanged. For a
/// BlockTT whose block lies before p, the block is carried to p.
VectorTT left_orthogonalize(const VectorTT& x, int p);
BlockTT left_orthogonalize(const BlockTT& x, int p);
/// Cores (p, N) become right-orthogonal. For a BlockTT whose block lies after
/// p, the block is carried to p.
VectorTT right_orthogonalize(const VectorTT& x, int p);
BlockTT right_orthogonalize(const BlockTT& x, int p);

/// Moves the block to `target` through exact QR steps, leaving the cores it
/// passes orthogonal.
BlockTT move_block(const BlockTT& x, int target);

// ---- arithmetic ----

VectorTT tt_round(const VectorTT& x, double delta, Index max_rank = std::numeric_limits<Index>::max());
VectorTT tt_add(const VectorTT& x, const VectorTT& y);
VectorTT tt_scale(const VectorTT& x, double alpha);
double tt_inner(const VectorTT& x, const VectorTT& y);
/// Norm computed by orthogonalization (no cancellation).
double tt_norm(const VectorTT& x);

VectorTT matvec_tt(const MatrixTT& a, const VectorTT& x);
BlockTT block_tt_matvec(const MatrixTT& a, const BlockTT& u);
MatrixTT matrix_tt_transpose(const MatrixTT& a);
MatrixTT diag_embed(const VectorTT& x);
MatrixTT matrix_tt_add(const MatrixTT& a, const MatrixTT& b);
MatrixTT matrix_tt_scale(const MatrixTT& a, double alpha);
/// Product a * b of two matrix TTs (bond ranks multiply).
MatrixTT matrix_tt_multiply(const MatrixTT& a, const MatrixTT& b);
MatrixTT matrix_tt_round(const MatrixTT& a, double delta, Index max_rank = std::numeric_limits<Index>::max());

// ---- block TT plumbing ----

/// A BlockTT with the block at the last position, viewed as a VectorTT whose
/// last mode has size K*I_N (k fastest).
VectorTT block_as_vector(const BlockTT& u);
BlockTT vector_as_block(const VectorTT& x, Index k);
/// Column k as a VectorTT.
VectorTT block_column(const BlockTT& u, Index k);
/// Scales column k of the block core by s[k].
BlockTT block_scale_columns(const BlockTT& u, const Vector& s);

/// Merged core of positions (n-1, n), n >= 1, with shape
/// (R_{n-2}, I_{n-1}, I_n, R_n, K). The block must sit at n-1 or n.
DenseTensor merge_cores(const BlockTT& x, int n);

enum class SplitDirection { left, right };

struct SplitResult {
    DenseTensor first;   ///< core that stays on the left bond side
    DenseTensor second;  ///< core that stays on the right bond side
    Index rank = 0;
    double discarded_energy = 0.0;
};

/// Delta-truncated split of a local block tensor.
///
/// 4th-order input (R_l, I, R_r, K), the ALS local layout:
///  - left:  rows (R_l, K) x cols (I, R_r). second = V^T as a right-orthogonal
///           core (r, I, R_r); first = U S as a carrier (R_l, K, r).
///  - right: rows (R_l, I) x cols (R_r, K). first = U as a left-orthogonal core
///           (R_l, I, r); second = S V^T as a carrier (r, K, R_r).
/// 5th-order input (R_l, I_1, I_2, R_r, K), the MALS local layout:
///  - left:  rows (R_l, I_1, K) x cols (I_2, R_r). first = U S as a block core
///           (R_l, K, I_1, r); second = V^T as a right-orthogonal core (r, I_2, R_r).
///  - right: rows (R_l, I_1) x cols (I_2, R_r, K). first = U as a left-orthogonal
///           core (R_l, I_1, r); second = S V^T as a block core (r, K, I_2, R_r).
SplitResult split_block_core(const DenseTensor& local, SplitDirection direction, double delta,
                             const TruncationOptions& opts = {});

/// Contracts an ALS carrier into its neighbour and returns the new block core
/// (R_l, K, I, R_r). For a left carrier (R_l', K, r) the neighbour is the core
/// on the left (R_l, I, R_l'); for a right carrier (r, K, R_r') it is the core
/// on the right (R_r', I, R_r).
DenseTensor absorb_carrier(const DenseTensor& carrier, const DenseTensor& neighbour, SplitDirection direction);

/// Block core (R_l, K, I, R_r) <-> local layout (R_l, I, R_r, K).
DenseTensor block_core_to_local(const DenseTensor& block_core);
DenseTensor local_to_block_core(const DenseTensor& local);

}  // namespace ttsvd
