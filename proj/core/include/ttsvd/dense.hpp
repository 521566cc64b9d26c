#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ttsvd {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * N-way array of doubles with column-major multi-index layout: the entry
 * (i_1, ..., i_N) lives at i_1 + i_2*I_1 + ... + i_N*I_1*...*I_{N-1}
 * (0-based). A default constructed tensor has order 0 and holds one scalar.
 */
class DenseTensor {
public:
    DenseTensor();
    explicit DenseTensor(std::vector<Index> shape);
    DenseTensor(std::vector<Index> shape, std::vector<double> data);
    DenseTensor(std::initializer_list<Index> shape) : DenseTensor(std::vector<Index>(shape)) {}

    static DenseTensor scalar(double value);
    static DenseTensor from_matrix(const Matrix& m);

    [[nodiscard]] int order() const noexcept { return static_cast<int>(shape_.size()); }
    [[nodiscard]] Index extent(int mode) const;
    [[nodiscard]] const std::vector<Index>& shape() const noexcept { return shape_; }
    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(data_.size()); }

    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }
    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    [[nodiscard]] Index linear_index(std::span<const Index> idx) const;
    double& operator()(std::span<const Index> idx) { return data_[static_cast<std::size_t>(linear_index(idx))]; }
    double operator()(std::span<const Index> idx) const { return data_[static_cast<std::size_t>(linear_index(idx))]; }
    double& operator()(std::initializer_list<Index> idx) { return (*this)(std::span<const Index>(idx.begin(), idx.size())); }
    double operator()(std::initializer_list<Index> idx) const { return (*this)(std::span<const Index>(idx.begin(), idx.size())); }

    /// Same data under a new shape with the same number of entries.
    [[nodiscard]] DenseTensor reshaped(std::vector<Index> shape) const&;
    [[nodiscard]] DenseTensor reshaped(std::vector<Index> shape) &&;

    /// Result mode k is source mode perm[k].
    [[nodiscard]] DenseTensor permuted(std::span<const int> perm) const;
    [[nodiscard]] DenseTensor permuted(std::initializer_list<int> perm) const {
        return permuted(std::span<const int>(perm.begin(), perm.size()));
    }

    /// View of the data as a rows x (size/rows) column-major matrix.
    [[nodiscard]] Eigen::Map<const Matrix> as_matrix(Index rows) const;
    [[nodiscard]] Eigen::Map<Matrix> as_matrix(Index rows);

    [[nodiscard]] double norm() const;
    DenseTensor& operator*=(double alpha);
    DenseTensor& operator+=(const DenseTensor& other);

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    std::vector<Index> shape_;
    std::vector<double> data_;
};

[[nodiscard]] Index product(std::span<const Index> extents);

Vector vectorize(const DenseTensor& t);
DenseTensor tensorize(const Vector& v, std::vector<Index> shape);

/// Unfolding with rows indexed by `row_modes` (in the given order) and columns
/// by the remaining modes in ascending order. Modes are 0-based.
Matrix matricize(const DenseTensor& t, std::span<const int> row_modes);
inline Matrix matricize(const DenseTensor& t, std::initializer_list<int> row_modes) {
    return matricize(t, std::span<const int>(row_modes.begin(), row_modes.size()));
}
/// Inverse of matricize for a tensor of the given shape.
DenseTensor dematricize(const Matrix& m, std::vector<Index> shape, std::span<const int> row_modes);

DenseTensor mode_n_product(const DenseTensor& t, int mode, const Matrix& b);

/// Contracts the last mode of `a` with the first mode of `b`.
DenseTensor contract_last_first(const DenseTensor& a, const DenseTensor& b);

struct SvdFactors {
    Matrix u;
    Vector s;
    Matrix v;
    double discarded_energy = 0.0;  ///< squared Frobenius norm of the dropped tail

    [[nodiscard]] Index rank() const noexcept { return s.size(); }
    [[nodiscard]] Matrix reconstruct() const;
};

struct TruncationOptions {
    Index max_rank = std::numeric_limits<Index>::max();
    Index min_rank = 1;
    /// Also drop singular values below max(rows, cols) * eps * s_1.
    bool drop_numerical_zeros = false;
};

/// Thin SVD, singular values in non-increasing order.
SvdFactors dense_svd(const Matrix& m);

/// Smallest rank r with sum_{k>r} s_k^2 <= delta^2 * ||m||_F^2, clamped to the options.
SvdFactors truncated_svd(const Matrix& m, double delta, const TruncationOptions& opts = {});

/// Rank chosen by the truncation rule for a given spectrum.
Index truncation_rank(const Vector& s, double delta, const TruncationOptions& opts, Index rows, Index cols);

struct QrFactors {
    Matrix q;  ///< rows x min(rows, cols), orthonormal columns
    Matrix r;  ///< min(rows, cols) x cols, upper triangular with nonnegative diagonal
};

QrFactors dense_qr(const Matrix& m);

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& m);

void require_finite(const Matrix& m, const char* what);

}  // namespace ttsvd
