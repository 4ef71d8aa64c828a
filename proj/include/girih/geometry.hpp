/// @file geometry.hpp
/// @brief Diamond tiling along y and wavefront blocking along z: tile shapes,
///        space-time tessellation, and inter-tile dependencies.
///
/// Tessellation layout (y-t plane, slope +-1/R):
///   - Rows of diamonds advance by D_w/(2R) time steps; odd rows are offset
///     by D_w/2 in y (brick pattern). Row 0 is clipped at t=0 to its upper
///     half, widest (D_w) at the first step. The last row is clipped flat at T.
///   - Each row holds Ny/D_w tiles. The odd-row tile straddling y=0 wraps:
///     it covers two fragments at opposite y edges but is one schedulable
///     unit. The stencil itself is not periodic; wrapping only merges the two
///     boundary half-diamonds into one tile.
///   - A tile's width at step t is D_w - 2R*|t - t_waist|, so the y extent
///     grows by R per side per step below the waist and shrinks above it.
///   - Tiles in rows >= 1 depend on the two tiles below them (modulo the y
///     wrap); duplicates collapse when Ny == D_w.

#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

namespace girih {

/// Wavefront tile parameters: N_F is the z cells advanced per pipeline
/// position, W_w the resulting total wavefront extent in z.
struct WavefrontSpec {
    int nf = 4;    // wavefront tile width (cells)
    int bs_z = 0;  // z block size for the barrier variant; 0 derives a default
};

/// W_w = D_w - 2R + N_F. Throws std::invalid_argument when the result
/// would be below 1 or the inputs are inadmissible.
int wavefront_width(int dw, int nf, int radius);

/// Default z block size: W_w * T_z rounded up to whole cache lines and to a
/// multiple of T_z so the block splits evenly.
int default_block_size(int ww, int tz);

/// LUPs in one extruded diamond: Nz * D_w^2 / (2R).
long long extruded_tile_volume(int dw, int radius, long long nz);

struct DiamondTile {
    int row = 0;
    int col = 0;
    int y_center = 0;      // interior y coordinate of the diamond axis
    long t_begin = 0;      // first executed time step (clipped)
    long t_end = 0;        // one past the last executed step
    long t_waist = 0;      // step at which the width is D_w (may lie outside [t_begin,t_end))
    bool bottom_clipped = false;
    bool top_clipped = false;
    bool wraps_y = false;  // covers fragments at both y edges

    long steps() const { return t_end - t_begin; }
};

/// Half-open y interval of a tile at time step t, in interior coordinates.
/// The bounds are signed: a wrapping tile reports yb < 0 and the caller maps
/// modulo Ny. Throws std::out_of_range for t outside [t_begin, t_end).
std::pair<int, int> diamond_y_bounds(const DiamondTile& tile, long t, int dw, int radius);

/// The set of diamond tiles exactly covering [0,Ny) x [0,T), with the
/// dependency lists the scheduler consumes. Immutable after construction.
struct DiamondTessellation {
    int ny = 0;
    long nt = 0;
    int dw = 0;
    int radius = 0;
    int cols = 0;  // tiles per row = Ny / D_w
    int rows = 0;
    std::vector<DiamondTile> tiles;          // id = row * cols + col
    std::vector<std::vector<int>> deps;      // per tile: ids it depends on
    std::vector<std::vector<int>> dependents;

    std::pair<int, int> y_bounds(int tile_id, long t) const {
        return diamond_y_bounds(tiles[tile_id], t, dw, radius);
    }
    /// Tile coverage at step t as up to two disjoint in-domain y intervals.
    /// Returns the number of intervals written to out[0..1].
    int y_pieces(int tile_id, long t, std::pair<int, int> out[2]) const;
    bool covers(int tile_id, int y, long t) const;
};

/// Builds the tessellation. Requires D_w mod 2R = 0, Ny mod D_w = 0, T >= 0.
DiamondTessellation build_tessellation(int ny, long nt, int dw, int radius);

} // namespace girih
