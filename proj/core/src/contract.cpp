#include "ttsvd/contract.hpp"

#include <string>
#include <vector>

#include "ttsvd/errors.hpp"

namespace ttsvd {

namespace {

thread_local std::uint64_t g_macs = 0;

void count(Index m, Index n, Index k) {
    g_macs += static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(k);
}

bool is_identity(const std::vector<int>& perm) {
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (perm[k] != static_cast<int>(k)) return false;
    }
    return true;
}

}  // namespace

std::uint64_t mac_count() noexcept { return g_macs; }

void reset_mac_count() noexcept { g_macs = 0; }

Matrix gemm(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
    if (a.cols() != b.rows()) throw ShapeError("gemm: inner dimensions differ");
    count(a.rows(), b.cols(), a.cols());
    Matrix c(a.rows(), b.cols());
    c.noalias() = a * b;
    return c;
}

Matrix gemm_tn(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
    if (a.rows() != b.rows()) throw ShapeError("gemm_tn: inner dimensions differ");
    count(a.cols(), b.cols(), a.rows());
    Matrix c(a.cols(), b.cols());
    c.noalias() = a.transpose() * b;
    return c;
}

DenseTensor contract(const DenseTensor& a, std::span<const int> a_modes, const DenseTensor& b,
                     std::span<const int> b_modes) {
    if (a_modes.size() != b_modes.size()) throw ShapeError("contract: mode lists differ in length");
    std::vector<bool> a_used(static_cast<std::size_t>(a.order()), false);
    std::vector<bool> b_used(static_cast<std::size_t>(b.order()), false);
    Index inner = 1;
    for (std::size_t k = 0; k < a_modes.size(); ++k) {
        const int ma = a_modes[k];
        const int mb = b_modes[k];
        if (ma < 0 || ma >= a.order() || mb < 0 || mb >= b.order() || a_used[static_cast<std::size_t>(ma)] ||
            b_used[static_cast<std::size_t>(mb)]) {
            throw ShapeError("contract: invalid contraction mode");
        }
        if (a.extent(ma) != b.extent(mb)) {
            throw ShapeError("contract: extent mismatch " + std::to_string(a.extent(ma)) + " vs " +
                             std::to_string(b.extent(mb)));
        }
        a_used[static_cast<std::size_t>(ma)] = true;
        b_used[static_cast<std::size_t>(mb)] = true;
        inner *= a.extent(ma);
    }

    std::vector<int> pa;
    std::vector<int> pb(b_modes.begin(), b_modes.end());
    std::vector<Index> out_shape;
    Index rows = 1;
    Index cols = 1;
    for (int m = 0; m < a.order(); ++m) {
        if (!a_used[static_cast<std::size_t>(m)]) {
            pa.push_back(m);
            out_shape.push_back(a.extent(m));
            rows *= a.extent(m);
        }
    }
    pa.insert(pa.end(), a_modes.begin(), a_modes.end());
    for (int m = 0; m < b.order(); ++m) {
        if (!b_used[static_cast<std::size_t>(m)]) {
            pb.push_back(m);
            out_shape.push_back(b.extent(m));
            cols *= b.extent(m);
        }
    }

    DenseTensor out(out_shape);
    if (rows == 0 || cols == 0) return out;
    auto c = out.as_matrix(rows);
    count(rows, cols, inner);
    if (inner == 0) return out;

    DenseTensor ta;
    DenseTensor tb;
    const DenseTensor* sa = &a;
    const DenseTensor* sb = &b;
    if (!is_identity(pa)) {
        ta = a.permuted(pa);
        sa = &ta;
    }
    if (!is_identity(pb)) {
        tb = b.permuted(pb);
        sb = &tb;
    }
    c.noalias() = sa->as_matrix(rows) * sb->as_matrix(inner);
    return out;
}

}  // namespace ttsvd
