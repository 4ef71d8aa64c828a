#include "girih/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace girih {

int wavefront_width(int dw, int nf, int radius) {
    if (radius < 1 || nf < 1 || dw < 2 * radius)
        throw std::invalid_argument("wavefront_width: need R >= 1, N_F >= 1, D_w >= 2R");
    const int ww = dw - 2 * radius + nf;
    if (ww < 1) throw std::invalid_argument("wavefront_width: nonpositive width");
    return ww;
}

int default_block_size(int ww, int tz) {
    constexpr int cells_per_line = 8;  // 64-byte lines of doubles
    const int unit = std::lcm(cells_per_line, tz);
    const int want = ww * tz;
    return ((want + unit - 1) / unit) * unit;
}

long long extruded_tile_volume(int dw, int radius, long long nz) {
    if (radius < 1 || dw < 2 * radius || dw % (2 * radius) != 0)
        throw std::invalid_argument("extruded_tile_volume: D_w must be a positive multiple of 2R");
    return nz * dw / (2 * radius) * dw;
}

std::pair<int, int> diamond_y_bounds(const DiamondTile& tile, long t, int dw, int radius) {
    if (t < tile.t_begin || t >= tile.t_end)
        throw std::out_of_range("diamond_y_bounds: time step outside tile");
    const long dist = t >= tile.t_waist ? t - tile.t_waist : tile.t_waist - t;
    const int width = dw - 2 * radius * static_cast<int>(dist);
    return {tile.y_center - width / 2, tile.y_center + width / 2};
}

DiamondTessellation build_tessellation(int ny, long nt, int dw, int radius) {
    if (radius < 1 || dw < 2 * radius || dw % (2 * radius) != 0)
        throw std::invalid_argument("build_tessellation: D_w must be a multiple of 2R");
    if (ny < dw || ny % dw != 0)
        throw std::invalid_argument("build_tessellation: Ny must be a multiple of D_w");
    if (nt < 0) throw std::invalid_argument("build_tessellation: negative time extent");

    DiamondTessellation tess;
    tess.ny = ny;
    tess.nt = nt;
    tess.dw = dw;
    tess.radius = radius;
    tess.cols = ny / dw;

    const long half = dw / (2 * radius);  // time steps per half diamond
    // Row 0 covers t in [0, half); row r >= 1 starts at (r-1)*half + 1 and
    // spans 2*half - 1 steps unclipped.
    long rows = 0;
    if (nt >= 1) {
        rows = 1;
        while ((rows - 1) * half + 1 < nt) ++rows;
    }
    tess.rows = static_cast<int>(rows);

    tess.tiles.reserve(static_cast<std::size_t>(rows) * tess.cols);
    for (int r = 0; r < tess.rows; ++r) {
        const bool offset_row = (r % 2) != 0;
        const long t_first = r == 0 ? 0 : (r - 1) * half + 1;
        const long t_last_nominal = r == 0 ? half : t_first + 2 * half - 1;
        for (int c = 0; c < tess.cols; ++c) {
            DiamondTile tile;
            tile.row = r;
            tile.col = c;
            tile.y_center = offset_row ? c * dw : c * dw + dw / 2;
            tile.t_begin = t_first;
            tile.t_end = std::min(t_last_nominal, nt);
            tile.t_waist = r == 0 ? 0 : static_cast<long>(r) * half;
            tile.bottom_clipped = (r == 0);
            tile.top_clipped = (t_last_nominal > nt);
            tile.wraps_y = offset_row && c == 0;
            tess.tiles.push_back(tile);
        }
    }

    const int n = static_cast<int>(tess.tiles.size());
    tess.deps.assign(n, {});
    tess.dependents.assign(n, {});
    const int C = tess.cols;
    for (int id = 0; id < n; ++id) {
        const DiamondTile& tile = tess.tiles[id];
        if (tile.row == 0) continue;
        const int below_row = tile.row - 1;
        int c0, c1;
        if (tile.row % 2 != 0) {  // offset row sits above an aligned row
            c0 = (tile.col - 1 + C) % C;
            c1 = tile.col;
        } else {  // aligned row sits above an offset row
            c0 = tile.col;
            c1 = (tile.col + 1) % C;
        }
        tess.deps[id].push_back(below_row * C + c0);
        if (c1 != c0) tess.deps[id].push_back(below_row * C + c1);
        for (int d : tess.deps[id]) tess.dependents[d].push_back(id);
    }
    return tess;
}

int DiamondTessellation::y_pieces(int tile_id, long t, std::pair<int, int> out[2]) const {
    auto [yb, ye] = y_bounds(tile_id, t);
    if (yb >= 0) {
        out[0] = {yb, ye};
        return 1;
    }
    // wrapping tile: fragment at the low edge and fragment at the high edge
    int count = 0;
    if (ye > 0) out[count++] = {0, ye};
    out[count++] = {yb + ny, ny};
    return count;
}

bool DiamondTessellation::covers(int tile_id, int y, long t) const {
    const DiamondTile& tile = tiles[tile_id];
    if (t < tile.t_begin || t >= tile.t_end) return false;
    auto [yb, ye] = y_bounds(tile_id, t);
    const int span = ye - yb;
    int d = (y - yb) % ny;
    if (d < 0) d += ny;
    return d < span;
}

} // namespace girih
