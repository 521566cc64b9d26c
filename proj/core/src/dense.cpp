#include "ttsvd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "ttsvd/contract.hpp"
#include "ttsvd/errors.hpp"

namespace ttsvd {

namespace {

void check_shape(const std::vector<Index>& shape) {
    for (Index e : shape) {
        if (e < 0) throw ShapeError("negative tensor extent");
    }
}

std::vector<int> complement_modes(int order, std::span<const int> row_modes) {
    std::vector<bool> used(static_cast<std::size_t>(order), false);
    for (int m : row_modes) {
        if (m < 0 || m >= order) {
            throw ShapeError("unfolding mode " + std::to_string(m) + " out of range for order " +
                             std::to_string(order));
        }
        if (used[static_cast<std::size_t>(m)]) {
            throw ShapeError("unfolding mode " + std::to_string(m) + " listed twice");
        }
        used[static_cast<std::size_t>(m)] = true;
    }
    std::vector<int> rest;
    for (int m = 0; m < order; ++m) {
        if (!used[static_cast<std::size_t>(m)]) rest.push_back(m);
    }
    return rest;
}

}  // namespace

Index product(std::span<const Index> extents) {
    Index p = 1;
    for (Index e : extents) p *= e;
    return p;
}

DenseTensor::DenseTensor() : data_(1, 0.0) {}

DenseTensor::DenseTensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_.assign(static_cast<std::size_t>(product(shape_)), 0.0);
}

DenseTensor::DenseTensor(std::vector<Index> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (static_cast<Index>(data_.size()) != product(shape_)) {
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match the product of extents " + std::to_string(product(shape_)));
    }
}

DenseTensor DenseTensor::scalar(double value) {
    DenseTensor t;
    t.data_[0] = value;
    return t;
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
    return DenseTensor({m.rows(), m.cols()}, std::vector<double>(m.data(), m.data() + m.size()));
}

Index DenseTensor::extent(int mode) const {
    if (mode < 0 || mode >= order()) throw ShapeError("mode index out of range");
    return shape_[static_cast<std::size_t>(mode)];
}

Index DenseTensor::linear_index(std::span<const Index> idx) const {
    if (static_cast<int>(idx.size()) != order()) throw ShapeError("index arity does not match tensor order");
    Index lin = 0;
    Index stride = 1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= shape_[k]) throw ShapeError("tensor index out of range");
        lin += idx[k] * stride;
        stride *= shape_[k];
    }
    return lin;
}

DenseTensor DenseTensor::reshaped(std::vector<Index> shape) const& {
    return DenseTensor(std::move(shape), data_);
}

DenseTensor DenseTensor::reshaped(std::vector<Index> shape) && {
    return DenseTensor(std::move(shape), std::move(data_));
}

DenseTensor DenseTensor::permuted(std::span<const int> perm) const {
    const int n = order();
    if (static_cast<int>(perm.size()) != n) throw ShapeError("permutation arity does not match tensor order");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]) throw ShapeError("invalid permutation");
        seen[static_cast<std::size_t>(p)] = true;
    }
    bool identity = true;
    for (int k = 0; k < n; ++k) identity = identity && perm[static_cast<std::size_t>(k)] == k;
    if (identity) return *this;

    std::vector<Index> src_stride(static_cast<std::size_t>(n));
    Index s = 1;
    for (int k = 0; k < n; ++k) {
        src_stride[static_cast<std::size_t>(k)] = s;
        s *= shape_[static_cast<std::size_t>(k)];
    }
    std::vector<Index> out_shape(static_cast<std::size_t>(n));
    std::vector<Index> stride(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out_shape[static_cast<std::size_t>(k)] = shape_[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
        stride[static_cast<std::size_t>(k)] = src_stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    }
    DenseTensor out(out_shape);
    const Index total = out.size();
    if (total == 0) return out;

    // Walk the output in storage order; the innermost mode is unrolled.
    const Index inner = out_shape[0];
    const Index inner_stride = stride[0];
    std::vector<Index> counter(static_cast<std::size_t>(n), 0);
    Index src = 0;
    double* dst = out.data();
    for (Index lin = 0; lin < total; lin += inner) {
        const double* from = data_.data() + src;
        for (Index i = 0; i < inner; ++i) dst[lin + i] = from[i * inner_stride];
        for (int k = 1; k < n; ++k) {
            auto ku = static_cast<std::size_t>(k);
            src += stride[ku];
            if (++counter[ku] < out_shape[ku]) break;
            src -= stride[ku] * out_shape[ku];
            counter[ku] = 0;
        }
    }
    return out;
}

Eigen::Map<const Matrix> DenseTensor::as_matrix(Index rows) const {
    const Index cols = rows == 0 ? 0 : size() / rows;
    if (rows * cols != size()) throw ShapeError("matrix view rows do not divide tensor size");
    return {data_.data(), rows, cols};
}

Eigen::Map<Matrix> DenseTensor::as_matrix(Index rows) {
    const Index cols = rows == 0 ? 0 : size() / rows;
    if (rows * cols != size()) throw ShapeError("matrix view rows do not divide tensor size");
    return {data_.data(), rows, cols};
}

double DenseTensor::norm() const {
    return Eigen::Map<const Vector>(data_.data(), size()).norm();
}

DenseTensor& DenseTensor::operator*=(double alpha) {
    for (double& x : data_) x *= alpha;
    return *this;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    if (other.shape_ != shape_) throw ShapeError("tensor shapes differ in addition");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Vector vectorize(const DenseTensor& t) {
    return Eigen::Map<const Vector>(t.data(), t.size());
}

DenseTensor tensorize(const Vector& v, std::vector<Index> shape) {
    return DenseTensor(std::move(shape), std::vector<double>(v.data(), v.data() + v.size()));
}

Matrix matricize(const DenseTensor& t, std::span<const int> row_modes) {
    std::vector<int> perm(row_modes.begin(), row_modes.end());
    const std::vector<int> rest = complement_modes(t.order(), row_modes);
    perm.insert(perm.end(), rest.begin(), rest.end());
    Index rows = 1;
    for (int m : row_modes) rows *= t.extent(m);
    DenseTensor p = t.permuted(perm);
    return p.as_matrix(rows);
}

DenseTensor dematricize(const Matrix& m, std::vector<Index> shape, std::span<const int> row_modes) {
    const int order = static_cast<int>(shape.size());
    std::vector<int> perm(row_modes.begin(), row_modes.end());
    const std::vector<int> rest = complement_modes(order, row_modes);
    perm.insert(perm.end(), rest.begin(), rest.end());
    std::vector<Index> permuted_shape;
    for (int p : perm) permuted_shape.push_back(shape[static_cast<std::size_t>(p)]);
    if (product(permuted_shape) != m.size()) throw ShapeError("matrix size does not match target tensor shape");
    DenseTensor p(permuted_shape, std::vector<double>(m.data(), m.data() + m.size()));
    std::vector<int> inverse(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = k;
    return p.permuted(inverse);
}

DenseTensor mode_n_product(const DenseTensor& t, int mode, const Matrix& b) {
    if (mode < 0 || mode >= t.order()) throw ShapeError("mode-n product: mode out of range");
    if (b.cols() != t.extent(mode)) {
        throw ShapeError("mode-n product: matrix has " + std::to_string(b.cols()) + " columns, mode extent is " +
                         std::to_string(t.extent(mode)));
    }
    const int rows[] = {mode};
    Matrix unfolded = matricize(t, rows);
    Matrix prod = gemm(b, unfolded);
    std::vector<Index> shape = t.shape();
    shape[static_cast<std::size_t>(mode)] = b.rows();
    return dematricize(prod, std::move(shape), rows);
}

DenseTensor contract_last_first(const DenseTensor& a, const DenseTensor& b) {
    if (a.order() < 1 || b.order() < 1) throw ShapeError("contracted product needs tensors of order >= 1");
    const Index bond = a.extent(a.order() - 1);
    if (b.extent(0) != bond) {
        throw ShapeError("contracted product: bond mismatch " + std::to_string(bond) + " vs " +
                         std::to_string(b.extent(0)));
    }
    const int sa[] = {a.order() - 1};
    const int sb[] = {0};
    return contract(a, sa, b, sb);
}

Matrix SvdFactors::reconstruct() const {
    return u * s.asDiagonal() * v.transpose();
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw NonFiniteError(std::string(what) + ": input contains NaN or Inf");
}

namespace {

SvdFactors svd_square_ish(const Matrix& m) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw Error("SVD did not converge");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV(), 0.0};
}

}  // namespace

SvdFactors dense_svd(const Matrix& m) {
    require_finite(m, "dense_svd");
    const Index rows = m.rows();
    const Index cols = m.cols();
    if (rows == 0 || cols == 0) {
        return {Matrix(rows, 0), Vector(0), Matrix(cols, 0), 0.0};
    }
    // Very rectangular inputs: orthogonal reduction first, then a small SVD.
    if (rows > 4 * cols) {
        QrFactors qr = dense_qr(m);
        SvdFactors small = svd_square_ish(qr.r);
        small.u = gemm(qr.q, small.u);
        return small;
    }
    if (cols > 4 * rows) {
        QrFactors qr = dense_qr(m.transpose());
        SvdFactors small = svd_square_ish(qr.r.transpose());
        small.v = gemm(qr.q, small.v);
        return small;
    }
    return svd_square_ish(m);
}

Index truncation_rank(const Vector& s, double delta, const TruncationOptions& opts, Index rows, Index cols) {
    const Index n = s.size();
    if (n == 0) return 0;
    const double total = s.squaredNorm();
    const double threshold = delta * delta * total;
    // tail(r) = sum_{k >= r} s_k^2, accumulated from the back.
    Index r = n;
    double tail = 0.0;
    for (Index k = n - 1; k >= 0; --k) {
        const double next = tail + s[k] * s[k];
        if (next > threshold) break;
        tail = next;
        r = k;
    }
    if (opts.drop_numerical_zeros) {
        const double tol = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * s[0];
        Index numeric = 0;
        while (numeric < n && s[numeric] > tol) ++numeric;
        r = std::min(r, numeric);
    }
    r = std::min(r, opts.max_rank);
    r = std::max(r, opts.min_rank);
    r = std::clamp<Index>(r, 1, n);
    return r;
}

SvdFactors truncated_svd(const Matrix& m, double delta, const TruncationOptions& opts) {
    if (!(delta >= 0.0)) throw InvalidArgument("truncated_svd: delta must be nonnegative");
    SvdFactors full = dense_svd(m);
    const Index r = truncation_rank(full.s, delta, opts, m.rows(), m.cols());
    if (r == full.rank()) return full;
    SvdFactors out;
    out.u = full.u.leftCols(r);
    out.v = full.v.leftCols(r);
    out.s = full.s.head(r);
    out.discarded_energy = full.s.tail(full.rank() - r).squaredNorm();
    return out;
}

QrFactors dense_qr(const Matrix& m) {
    require_finite(m, "dense_qr");
    const Index rows = m.rows();
    const Index cols = m.cols();
    const Index k = std::min(rows, cols);
    Eigen::HouseholderQR<Matrix> qr(m);
    QrFactors out;
    out.q = qr.householderQ() * Matrix::Identity(rows, k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Index i = 0; i < k; ++i) {
        if (out.r(i, i) < 0.0) {
            out.r.row(i) *= -1.0;
            out.q.col(i) *= -1.0;
        }
    }
    return out;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
    require_finite(m, "symmetric_eigen");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace ttsvd
