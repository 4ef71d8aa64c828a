/// @file kernels.hpp
/// @brief Inline point-update kernels shared by the naive sweep and the tiled
///        engine. Both paths must run the exact same expressions with the same
///        operand association so results are bit-reproducible across traversal
///        orders.

#pragma once

#include "girih/stencil.hpp"

#include <cstddef>

namespace girih {

/// Raw-pointer view of a ProblemState, resolved once per run.
struct KernelContext {
    StencilKind kind{};
    double* even = nullptr;                 // field holding even time levels
    double* odd = nullptr;                  // field holding odd time levels
    std::array<const double*, 13> coeff{};  // per-kind coefficient fields
    std::array<double, 5> cc{};             // scalar coefficients
    std::size_t sy = 0;                     // y stride (elements)
    std::size_t sz = 0;                     // z stride (elements)

    const double* src(long t) const { return (t % 2 == 0) ? even : odd; }
    double* dst(long t) const { return (t % 2 == 0) ? odd : even; }
};

KernelContext make_kernel_context(ProblemState& state);

inline double point_const7(const double* V, std::size_t c, std::size_t sy, std::size_t sz,
                           double c0, double c1) {
    return c0 * V[c]
         + c1 * (V[c + 1] + V[c - 1])
         + c1 * (V[c + sy] + V[c - sy])
         + c1 * (V[c + sz] + V[c - sz]);
}

inline double point_var7(const double* V, std::size_t c, std::size_t sy, std::size_t sz,
                         const std::array<const double*, 13>& C) {
    return C[0][c] * V[c]
         + C[1][c] * V[c + 1]
         + C[2][c] * V[c - 1]
         + C[3][c] * V[c + sy]
         + C[4][c] * V[c - sy]
         + C[5][c] * V[c + sz]
         + C[6][c] * V[c - sz];
}

// Second order in time; U is the previous level and is overwritten in place.
// The coefficient field scales the entire bracketed Laplacian sum.
inline double point_const25(const double* V, const double* U, const double* C, std::size_t c,
                            std::size_t sy, std::size_t sz, const std::array<double, 5>& cc) {
    return 2 * V[c] - U[c]
         + C[c] * (cc[0] * V[c]
                 + cc[1] * (V[c + 1] + V[c - 1]
                          + V[c + sy] + V[c - sy]
                          + V[c + sz] + V[c - sz])
                 + cc[2] * (V[c + 2] + V[c - 2]
                          + V[c + 2 * sy] + V[c - 2 * sy]
                          + V[c + 2 * sz] + V[c - 2 * sz])
                 + cc[3] * (V[c + 3] + V[c - 3]
                          + V[c + 3 * sy] + V[c - 3 * sy]
                          + V[c + 3 * sz] + V[c - 3 * sz])
                 + cc[4] * (V[c + 4] + V[c - 4]
                          + V[c + 4 * sy] + V[c - 4 * sy]
                          + V[c + 4 * sz] + V[c - 4 * sz]));
}

inline double point_var25(const double* V, std::size_t c, std::size_t sy, std::size_t sz,
                          const std::array<const double*, 13>& C) {
    return C[0][c] * V[c]
         + C[1][c] * (V[c + 1] + V[c - 1])
         + C[2][c] * (V[c + sy] + V[c - sy])
         + C[3][c] * (V[c + sz] + V[c - sz])
         + C[4][c] * (V[c + 2] + V[c - 2])
         + C[5][c] * (V[c + 2 * sy] + V[c - 2 * sy])
         + C[6][c] * (V[c + 2 * sz] + V[c - 2 * sz])
         + C[7][c] * (V[c + 3] + V[c - 3])
         + C[8][c] * (V[c + 3 * sy] + V[c - 3 * sy])
         + C[9][c] * (V[c + 3 * sz] + V[c - 3 * sz])
         + C[10][c] * (V[c + 4] + V[c - 4])
         + C[11][c] * (V[c + 4 * sy] + V[c - 4 * sy])
         + C[12][c] * (V[c + 4 * sz] + V[c - 4 * sz]);
}

/// Updates one x-row [ib, ie) of time step t at fixed (j, k).
/// Indices are in allocated-field coordinates (ghost offset already applied).
inline void update_row(const KernelContext& ctx, long t, int k, int j, int ib, int ie) {
    const double* V = ctx.src(t);
    double* U = ctx.dst(t);
    const std::size_t row = static_cast<std::size_t>(k) * ctx.sz + static_cast<std::size_t>(j) * ctx.sy;
    switch (ctx.kind) {
    case StencilKind::Const7pt:
        for (int i = ib; i < ie; ++i) {
            const std::size_t c = row + i;
            U[c] = point_const7(V, c, ctx.sy, ctx.sz, ctx.cc[0], ctx.cc[1]);
        }
        break;
    case StencilKind::Var7pt:
        for (int i = ib; i < ie; ++i) {
            const std::size_t c = row + i;
            U[c] = point_var7(V, c, ctx.sy, ctx.sz, ctx.coeff);
        }
        break;
    case StencilKind::Const25pt:
        for (int i = ib; i < ie; ++i) {
            const std::size_t c = row + i;
            U[c] = point_const25(V, U, ctx.coeff[0], c, ctx.sy, ctx.sz, ctx.cc);
        }
        break;
    case StencilKind::Var25pt:
        for (int i = ib; i < ie; ++i) {
            const std::size_t c = row + i;
            U[c] = point_var25(V, c, ctx.sy, ctx.sz, ctx.coeff);
        }
        break;
    }
}

} // namespace girih
