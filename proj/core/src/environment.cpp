#include "ttsvd/environment.hpp"

#include "ttsvd/contract.hpp"
#include "ttsvd/errors.hpp"

namespace ttsvd {

DenseTensor env_boundary() { return DenseTensor({1, 1, 1}, {1.0}); }

DenseTensor env_left_step(const DenseTensor& left, const DenseTensor& u, const DenseTensor& a, const DenseTensor& v) {
    // L(a,b,c) V(c,j,c') -> (a,b,j,c')
    DenseTensor t1 = contract(left, {2}, v, {0});
    // (a,b,j,c') A(b,i,j,b') -> (a,c',i,b')
    DenseTensor t2 = contract(t1, {1, 2}, a, {0, 2});
    // (a,c',i,b') U(a,i,a') -> (c',b',a')
    return contract(t2, {0, 2}, u, {0, 1}).permuted({2, 1, 0});
}

DenseTensor env_right_step(const DenseTensor& right, const DenseTensor& u, const DenseTensor& a,
                           const DenseTensor& v) {
    // R(a',b',c') V(c,j,c') -> (a',b',c,j)
    DenseTensor t1 = contract(right, {2}, v, {2});
    // (a',b',c,j) A(b,i,j,b') -> (a',c,b,i)
    DenseTensor t2 = contract(t1, {1, 3}, a, {3, 2});
    // (a',c,b,i) U(a,i,a') -> (c,b,a)
    return contract(t2, {0, 3}, u, {2, 1}).permuted({2, 1, 0});
}

Environment env_init(const BlockTT& u, const MatrixTT& a, const BlockTT& v) {
    const int n = a.length();
    if (u.length() != n || v.length() != n) throw ShapeError("env_init: chain lengths differ");
    if (u.block_position() != n - 1 || v.block_position() != n - 1) {
        throw InvalidArgument("env_init: blocks must sit at the last core");
    }
    if (u.mode_sizes() != a.row_sizes() || v.mode_sizes() != a.col_sizes()) {
        throw ShapeError("env_init: chain modes do not match the matrix");
    }
    Environment env;
    env.left.assign(static_cast<std::size_t>(n), DenseTensor());
    env.right.assign(static_cast<std::size_t>(n), DenseTensor());
    env.left[0] = env_boundary();
    for (int p = 0; p + 1 < n; ++p) {
        auto pu = static_cast<std::size_t>(p);
        env.left[pu + 1] = env_left_step(env.left[pu], u.core(p), a.core(p), v.core(p));
    }
    env.right[static_cast<std::size_t>(n - 1)] = env_boundary();
    return env;
}

DenseTensor als_apply(const DenseTensor& left, const DenseTensor& a, const DenseTensor& right, const DenseTensor& y) {
    // L(a,b,c) Y(c,j,f,k) -> (a,b,j,f,k)
    DenseTensor t1 = contract(left, {2}, y, {0});
    // (a,b,j,f,k) A(b,i,j,e) -> (a,f,k,i,e)
    DenseTensor t2 = contract(t1, {1, 2}, a, {0, 2});
    // (a,f,k,i,e) R(d,e,f) -> (a,k,i,d)
    return contract(t2, {1, 4}, right, {2, 1}).permuted({0, 2, 3, 1});
}

DenseTensor als_apply_transpose(const DenseTensor& left, const DenseTensor& a, const DenseTensor& right,
                                const DenseTensor& x) {
    // L(a,b,c) X(a,i,d,k) -> (b,c,i,d,k)
    DenseTensor t1 = contract(left, {0}, x, {0});
    // (b,c,i,d,k) A(b,i,j,e) -> (c,d,k,j,e)
    DenseTensor t2 = contract(t1, {0, 2}, a, {0, 1});
    // (c,d,k,j,e) R(d,e,f) -> (c,k,j,f)
    return contract(t2, {1, 4}, right, {0, 1}).permuted({0, 2, 3, 1});
}

DenseTensor mals_apply(const DenseTensor& left, const DenseTensor& a1, const DenseTensor& a2,
                       const DenseTensor& right, const DenseTensor& y) {
    // L(a,b,c) Y(c,j1,j2,f,k) -> (a,b,j1,j2,f,k)
    DenseTensor t1 = contract(left, {2}, y, {0});
    // A1(b,i1,j1,e) -> (a,j2,f,k,i1,e)
    DenseTensor t2 = contract(t1, {1, 2}, a1, {0, 2});
    // A2(e,i2,j2,g) -> (a,f,k,i1,i2,g)
    DenseTensor t3 = contract(t2, {1, 5}, a2, {2, 0});
    // R(d,g,f) -> (a,k,i1,i2,d)
    return contract(t3, {1, 5}, right, {2, 1}).permuted({0, 2, 3, 4, 1});
}

DenseTensor mals_apply_transpose(const DenseTensor& left, const DenseTensor& a1, const DenseTensor& a2,
                                 const DenseTensor& right, const DenseTensor& x) {
    // L(a,b,c) X(a,i1,i2,d,k) -> (b,c,i1,i2,d,k)
    DenseTensor t1 = contract(left, {0}, x, {0});
    // A1(b,i1,j1,e) -> (c,i2,d,k,j1,e)
    DenseTensor t2 = contract(t1, {0, 2}, a1, {0, 1});
    // A2(e,i2,j2,g) -> (c,d,k,j1,j2,g)
    DenseTensor t3 = contract(t2, {1, 5}, a2, {1, 0});
    // R(d,g,f) -> (c,k,j1,j2,f)
    return contract(t3, {1, 5}, right, {0, 1}).permuted({0, 2, 3, 4, 1});
}

}  // namespace ttsvd
