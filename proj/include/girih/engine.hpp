/// @file engine.hpp
/// @brief Executes extruded diamond tiles with a thread group: multi-dimensional
///        intra-tile decomposition plus two wavefront schemes.
///
/// RelaxedPipelined: thread layers along z form pipeline positions; position p
/// executes time steps p, p+T_z, ... of the tile, sweeping z in N_F-cell
/// chunks. A position may not pass a chunk until the position holding the
/// previous time step has published progress R cells beyond it (monotone
/// per-position counters with acquire/release visibility). This keeps a
/// W_w = D_w - 2R + N_F deep window of the grid in flight.
///
/// FixedExecutionToData: z is traversed in blocks of bs_z; within a block all
/// time steps run with the window shifting by -R per step and a full-group
/// barrier after every step. Each thread owns a fixed set of z cells (by
/// absolute position), so the same data stays with the same thread at every
/// time step of the tile.
///
/// Both variants update every (x, y, z, t) point of a tile exactly once via
/// the shared point kernels, so results are bitwise equal to the naive sweep.

#pragma once

#include "girih/geometry.hpp"
#include "girih/stencil.hpp"

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace girih {

/// Threads per axis inside one tile; T_c splits per-cell components and stays
/// 1 for scalar stencils. T_y is 1 or 2 so the y split stays parallel to the
/// time axis.
struct ThreadGroupShape {
    int tx = 1;
    int ty = 1;
    int tz = 1;
    int tc = 1;
    int size() const { return tc * tx * ty * tz; }
};

enum class WavefrontVariant { RelaxedPipelined, FixedExecutionToData };

WavefrontVariant variant_from_name(const std::string& name);
const char* variant_name(WavefrontVariant v);

/// Cell ranges handed to decompose(); y bounds are the tile's base range.
struct TileBounds {
    int xb = 0, xe = 0;
    int yb = 0, ye = 0;
    int bs_z = 0;
};

struct ThreadAssignment {
    int tid_x = 0, tid_y = 0, tid_z = 0;
    int ib = 0, ie = 0;    // x range
    int yb = 0, ye = 0;    // y half (midpoint split when T_y = 2)
    int b_inc = 0, e_inc = 0;  // per-step growth of the y bounds in a lower half
    int zbi = 0, zei = 0;  // z chunk within a wavefront block [0, bs_z)
};

/// Splits tile bounds across a thread group: x by quotient/remainder, y at the
/// midpoint (T_y = 2), z into equal chunks of the wavefront block.
/// Throws std::invalid_argument when the shape cannot be laid onto the bounds.
std::vector<ThreadAssignment> decompose(const TileBounds& bounds, const ThreadGroupShape& shape,
                                        int radius);

/// Instrumentation: per-(cell, step) update counters for the exactly-once
/// contract, optionally recording which group thread touched each point (for
/// the fixed-execution-to-data affinity check). Debug builds attach one
/// automatically; tests pass one explicitly.
class UpdateLedger {
public:
    UpdateLedger(const GridSpec& grid, long steps, bool track_owners = false);
    void record(long t, int z, int y, int x, int owner);  // interior-local coordinates
    bool all_exactly_once() const;
    std::uint32_t count(long t, int z, int y, int x) const;
    /// True when every grid cell was updated by one thread across all steps.
    bool owner_fixed_per_cell() const;

private:
    int nx_, ny_, nz_;
    long steps_;
    std::vector<std::atomic<std::uint32_t>> counts_;
    std::vector<std::atomic<std::int32_t>> owners_;
    std::size_t index(long t, int z, int y, int x) const {
        return ((static_cast<std::size_t>(t) * nz_ + z) * ny_ + y) * nx_ + x;
    }
};

struct PerfReport {
    double wall_seconds = 0.0;
    long long lups = 0;
    double glups = 0.0;
    long long tiles = 0;
};

struct RunOptions {
    UpdateLedger* ledger = nullptr;
    std::ostream* trace_out = nullptr;  // execution trace CSV sink
};

/// Executes one tile with a transient thread group. All dependency tiles must
/// already be complete; the caller owns that ordering.
void update_tile(ProblemState& state, const DiamondTessellation& tess, int tile_id,
                 const WavefrontSpec& wf, const ThreadGroupShape& shape, WavefrontVariant variant,
                 UpdateLedger* ledger = nullptr);

/// Advances the state by T steps with n_groups thread groups of the given
/// shape pulling tiles from the dependency scheduler.
PerfReport run(ProblemState& state, long steps, int dw, const WavefrontSpec& wf,
               const ThreadGroupShape& shape, WavefrontVariant variant, int n_groups,
               const RunOptions& opts = {});

} // namespace girih
