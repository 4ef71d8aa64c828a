/// @file stencil.hpp
/// @brief Grid storage, the four corner-case stencil kernels, deterministic
///        initialization, and the naive reference sweep (the correctness oracle).

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace girih {

/// The four corner-case stencils: 7/25 point, constant/variable coefficients.
enum class StencilKind { Const7pt, Var7pt, Const25pt, Var25pt };

struct StencilTraits {
    const char* name;
    int radius;          // R: cells of reach per axis
    int domain_streams;  // N_D: domain-sized arrays read+written per sweep
    int flops_per_lup;
    int time_order;      // 1: Jacobi ping-pong; 2: leapfrog (reads previous level too)
    int coeff_arrays;    // domain-sized coefficient fields
};

const StencilTraits& traits(StencilKind kind);
StencilKind stencil_from_name(const std::string& name);

/// Interior cell counts per axis plus leading-dimension padding.
/// Leading dimension is x (unit stride).
struct GridSpec {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    int pad_x = 0;                          // extra trailing elements per x-row
    static constexpr int element_bytes = 8; // double precision throughout

    /// Allocated elements along x including ghosts and padding.
    int x_alloc(int radius) const { return nx + 2 * radius + pad_x; }
    /// N_xb: bytes in the leading dimension.
    long long leading_dim_bytes(int radius) const {
        return static_cast<long long>(x_alloc(radius)) * element_bytes;
    }
};

/// Dense 3-D scalar field, layout [k][j][i] with i unit-stride.
class Field {
public:
    Field() = default;
    Field(int x, int y, int z) : x_(x), y_(y), z_(z), data_(static_cast<std::size_t>(x) * y * z) {}

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * y_ + j) * x_ + i;
    }
    double& at(int i, int j, int k) { return data_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return data_[index(i, j, k)]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }
    int x() const { return x_; }
    int y() const { return y_; }
    int z() const { return z_; }

    std::size_t stride_y() const { return x_; }
    std::size_t stride_z() const { return static_cast<std::size_t>(x_) * y_; }

    bool bitwise_equal(const Field& o) const { return data_ == o.data_; }

private:
    int x_ = 0, y_ = 0, z_ = 0;
    std::vector<double> data_;
};

/// The space-time working set: ping-pong solution fields, coefficient fields,
/// and the number of completed time steps.
///
/// Level parity convention: time level t lives in `u` when t is even, in `v`
/// when t is odd. A step reading level t writes level t+1 into the other
/// field, so no pointer swapping is needed; source/destination roles are
/// indexed by parity. For the second-order-in-time kind the destination field
/// also supplies the level t-1 operand before being overwritten.
struct ProblemState {
    StencilKind kind{};
    GridSpec grid{};
    int radius = 0;
    Field u;                       // even time levels (holds level 0 after init)
    Field v;                       // odd time levels (holds level -1 seed for time_order=2)
    std::vector<Field> coeffs;     // per-kind coefficient fields
    std::array<double, 5> cc{};    // scalar coefficients c0..c4 (constant-coefficient kinds)
    long t_current = 0;

    Field& level(long t) { return (t % 2 == 0) ? u : v; }
    const Field& level(long t) const { return (t % 2 == 0) ? u : v; }
    /// Field holding the most recently completed time level.
    const Field& current() const { return level(t_current); }
    Field& current() { return level(t_current); }
};

/// Counter-based generator value keyed on (seed, field, k, j, i); in [-0.5, 0.5).
double init_value(std::uint64_t seed, int field, int k, int j, int i);

/// Builds a fully initialized state. Every cell (interior and ghost) of both
/// solution fields and all coefficient fields is filled deterministically, so
/// equal (kind, grid, seed) yield bit-identical states regardless of fill order.
/// Throws std::invalid_argument when an extent is below 2R+1.
ProblemState init_state(StencilKind kind, const GridSpec& grid, std::uint64_t seed);

/// Value the stencil expression produces at interior cell (i,j,k) for the next
/// time level, given the state's current parity. Pure; does not write.
double apply_point(const ProblemState& state, int i, int j, int k);

/// T full-grid sweeps in lexicographic (k,j,i) order; ghost cells are never
/// written. Single-threaded by contract; this is the correctness oracle.
void naive_sweep(ProblemState& state, long steps);

/// FNV-1a over the interior bytes of the current level, for golden tests.
std::uint64_t interior_checksum(const ProblemState& state);

} // namespace girih
