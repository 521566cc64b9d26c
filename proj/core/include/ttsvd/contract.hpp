#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

#include "ttsvd/dense.hpp"

namespace ttsvd {

/// Multiply-accumulate operations performed by gemm() and contract() on the
/// calling thread since the last reset. An m x k by k x n product counts m*n*k.
std::uint64_t mac_count() noexcept;
void reset_mac_count() noexcept;

/// Counts the MACs issued while alive, on the constructing thread.
class MacScope {
public:
    MacScope() noexcept : start_(mac_count()) {}
    [[nodiscard]] std::uint64_t elapsed() const noexcept { return mac_count() - start_; }

private:
    std::uint64_t start_;
};

Matrix gemm(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);
/// a^T b
Matrix gemm_tn(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);

/// Pairwise tensor contraction: modes a_modes[k] of `a` are summed against
/// b_modes[k] of `b`. The result carries the free modes of `a` in ascending
/// order followed by the free modes of `b` in ascending order. Implemented as
/// one permutation of each operand and a single GEMM.
DenseTensor contract(const DenseTensor& a, std::span<const int> a_modes, const DenseTensor& b,
                     std::span<const int> b_modes);
inline DenseTensor contract(const DenseTensor& a, std::initializer_list<int> a_modes, const DenseTensor& b,
                            std::initializer_list<int> b_modes) {
    return contract(a, std::span<const int>(a_modes.begin(), a_modes.size()), b,
                    std::span<const int>(b_modes.begin(), b_modes.size()));
}

}  // namespace ttsvd
