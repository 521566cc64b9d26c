#include "oracles.hpp"

#include <cmath>
#include <random>

namespace ttsvd::oracle {

Matrix upper_toeplitz(const Vector& s) {
    const Index m = s.size();
    Matrix t = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = i + 1; j < m; ++j) t(i, j) = s(j - i - 1);
    }
    return t;
}

Matrix upper_antihankel(const Vector& s) {
    const Index m = s.size();
    Matrix h = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; i + j <= m - 2; ++j) h(i, j) = s(m - 2 - i - j);
    }
    return h;
}

Matrix full_toeplitz(const Vector& x) {
    const Index m = x.size() / 2;
    Matrix a(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) a(i, j) = x(m - 1 + i - j);
    }
    return a;
}

Matrix shift(Index m) {
    Matrix f = Matrix::Zero(m, m);
    for (Index i = 0; i + 1 < m; ++i) f(i, i + 1) = 1.0;
    return f;
}

Matrix tridiagonal(const Vector& a, const Vector& b, const Vector& c) {
    const Index m = b.size();
    Matrix t = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
        t(i, i) = b(i);
        if (i + 1 < m) {
            t(i + 1, i) = a(i);
            t(i, i + 1) = c(i + 1);
        }
    }
    return t;
}

Matrix hilbert(Index rows, Index cols) {
    Matrix h(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
    }
    return h;
}

double residual(const Matrix& a, const Matrix& u, const Matrix& v, const Vector& s) {
    return (a.transpose() * u - v * s.asDiagonal()).norm() / s.norm();
}

Vector power_singular_values(const Matrix& a, Index k, int iterations) {
    Matrix g = a.transpose() * a;
    Vector out(k);
    for (Index c = 0; c < k; ++c) {
        Vector x = Vector::Ones(g.cols()) + Vector::LinSpaced(g.cols(), 0.0, 1.0);
        double lambda = 0.0;
        for (int it = 0; it < iterations; ++it) {
            Vector y = g * x;
            const double next = x.dot(y) / x.dot(x);
            x = y / y.norm();
            if (std::abs(next - lambda) <= 1e-15 * std::abs(next)) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        out(c) = std::sqrt(std::max(lambda, 0.0));
        g -= lambda * x * x.transpose();
    }
    return out;
}

Matrix random_normal(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    }
    return m;
}

}  // namespace ttsvd::oracle
