#include "girih/stencil.hpp"
#include "girih/kernels.hpp"

#include <cstring>
#include <stdexcept>

namespace girih {

namespace {

const StencilTraits kTraits[] = {
    // name        R  N_D flops t-order coeff arrays
    {"const7pt", 1, 2, 7, 1, 0},
    {"var7pt", 1, 9, 13, 1, 7},
    {"const25pt", 4, 3, 33, 2, 1},
    {"var25pt", 4, 15, 37, 1, 13},
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// field indices for keyed initialization
constexpr int kFieldU = 0;
constexpr int kFieldV = 1;
constexpr int kFieldCoeffBase = 2;
constexpr int kFieldScalar = 64;

void fill_field(Field& f, std::uint64_t seed, int field_idx) {
    for (int k = 0; k < f.z(); ++k)
        for (int j = 0; j < f.y(); ++j)
            for (int i = 0; i < f.x(); ++i)
                f.at(i, j, k) = init_value(seed, field_idx, k, j, i);
}

} // namespace

const StencilTraits& traits(StencilKind kind) { return kTraits[static_cast<int>(kind)]; }

StencilKind stencil_from_name(const std::string& name) {
    for (int i = 0; i < 4; ++i)
        if (name == kTraits[i].name) return static_cast<StencilKind>(i);
    throw std::invalid_argument("unknown stencil kind: " + name);
}

double init_value(std::uint64_t seed, int field, int k, int j, int i) {
    std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC909ull);
    h = splitmix64(h ^ static_cast<std::uint64_t>(field));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(k)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(j)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)));
    return static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5;
}

ProblemState init_state(StencilKind kind, const GridSpec& grid, std::uint64_t seed) {
    const StencilTraits& tr = traits(kind);
    const int R = tr.radius;
    const int min_extent = 2 * R + 1;
    if (grid.nx < min_extent || grid.ny < min_extent || grid.nz < min_extent)
        throw std::invalid_argument("grid extent below 2R+1 for stencil radius");
    if (grid.pad_x < 0) throw std::invalid_argument("negative leading-dimension padding");

    ProblemState s;
    s.kind = kind;
    s.grid = grid;
    s.radius = R;
    const int X = grid.x_alloc(R);
    const int Y = grid.ny + 2 * R;
    const int Z = grid.nz + 2 * R;
    s.u = Field(X, Y, Z);
    s.v = Field(X, Y, Z);
    fill_field(s.u, seed, kFieldU);
    fill_field(s.v, seed, kFieldV);
    s.coeffs.reserve(tr.coeff_arrays);
    for (int c = 0; c < tr.coeff_arrays; ++c) {
        s.coeffs.emplace_back(X, Y, Z);
        fill_field(s.coeffs.back(), seed, kFieldCoeffBase + c);
    }
    for (int c = 0; c < 5; ++c) s.cc[c] = init_value(seed, kFieldScalar, 0, 0, c);
    s.t_current = 0;
    return s;
}

KernelContext make_kernel_context(ProblemState& state) {
    KernelContext ctx;
    ctx.kind = state.kind;
    ctx.even = state.u.data();
    ctx.odd = state.v.data();
    for (std::size_t c = 0; c < state.coeffs.size(); ++c) ctx.coeff[c] = state.coeffs[c].data();
    ctx.cc = state.cc;
    ctx.sy = state.u.stride_y();
    ctx.sz = state.u.stride_z();
    return ctx;
}

double apply_point(const ProblemState& state, int i, int j, int k) {
    // same expressions as update_row, evaluated for a single point
    KernelContext ctx = make_kernel_context(const_cast<ProblemState&>(state));
    const long t = state.t_current;
    const double* V = ctx.src(t);
    const double* U = ctx.dst(t);
    const std::size_t c = state.u.index(i, j, k);
    switch (state.kind) {
    case StencilKind::Const7pt: return point_const7(V, c, ctx.sy, ctx.sz, ctx.cc[0], ctx.cc[1]);
    case StencilKind::Var7pt: return point_var7(V, c, ctx.sy, ctx.sz, ctx.coeff);
    case StencilKind::Const25pt: return point_const25(V, U, ctx.coeff[0], c, ctx.sy, ctx.sz, ctx.cc);
    case StencilKind::Var25pt: return point_var25(V, c, ctx.sy, ctx.sz, ctx.coeff);
    }
    return 0.0;
}

void naive_sweep(ProblemState& state, long steps) {
    if (steps < 0) throw std::invalid_argument("negative step count");
    KernelContext ctx = make_kernel_context(state);
    const int R = state.radius;
    const int xb = R, xe = R + state.grid.nx;
    const int yb = R, ye = R + state.grid.ny;
    const int zb = R, ze = R + state.grid.nz;
    for (long t = state.t_current; t < state.t_current + steps; ++t)
        for (int k = zb; k < ze; ++k)
            for (int j = yb; j < ye; ++j)
                update_row(ctx, t, k, j, xb, xe);
    state.t_current += steps;
}

std::uint64_t interior_checksum(const ProblemState& state) {
    const Field& f = state.current();
    const int R = state.radius;
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (int k = R; k < R + state.grid.nz; ++k)
        for (int j = R; j < R + state.grid.ny; ++j)
            for (int i = R; i < R + state.grid.nx; ++i) {
                std::uint64_t bits;
                const double x = f.at(i, j, k);
                static_assert(sizeof(bits) == sizeof(x));
                std::memcpy(&bits, &x, sizeof(bits));
                for (int b = 0; b < 8; ++b) {
                    h ^= (bits >> (8 * b)) & 0xFF;
                    h *= 0x100000001B3ull;
                }
            }
    return h;
}

} // namespace girih
