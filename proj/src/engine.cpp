#include "girih/engine.hpp"

#include "girih/kernels.hpp"
#include "girih/scheduler.hpp"

#include <algorithm>
#include <barrier>
#include <cstdio>
#include <cassert>
#include <chrono>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace girih {

WavefrontVariant variant_from_name(const std::string& name) {
    if (name == "relaxed") return WavefrontVariant::RelaxedPipelined;
    if (name == "fed") return WavefrontVariant::FixedExecutionToData;
    throw std::invalid_argument("unknown wavefront variant: " + name);
}

const char* variant_name(WavefrontVariant v) {
    return v == WavefrontVariant::RelaxedPipelined ? "relaxed" : "fed";
}

std::vector<ThreadAssignment> decompose(const TileBounds& bounds, const ThreadGroupShape& shape,
                                        int radius) {
    if (shape.tx < 1 || shape.ty < 1 || shape.tz < 1 || shape.tc < 1)
        throw std::invalid_argument("decompose: thread counts must be positive");
    if (shape.ty > 2) throw std::invalid_argument("decompose: T_y must be 1 or 2");
    if (shape.tc != 1) throw std::invalid_argument("decompose: T_c > 1 needs multi-component cells");
    const int xcells = bounds.xe - bounds.xb;
    if (xcells < shape.tx) throw std::invalid_argument("decompose: fewer x cells than T_x threads");
    if (shape.ty == 2 && bounds.ye - bounds.yb < 2)
        throw std::invalid_argument("decompose: y range too small to halve");
    if (bounds.bs_z < shape.tz || bounds.bs_z % shape.tz != 0)
        throw std::invalid_argument("decompose: block size must be a positive multiple of T_z");

    std::vector<ThreadAssignment> out(shape.size());
    const int q = xcells / shape.tx;
    const int r = xcells % shape.tx;
    const int chunk = bounds.bs_z / shape.tz;
    const int mid = (bounds.yb + bounds.ye) / 2;
    for (int tid = 0; tid < shape.size(); ++tid) {
        ThreadAssignment& a = out[tid];
        a.tid_x = tid % shape.tx;
        a.tid_y = (tid / shape.tx) % shape.ty;
        a.tid_z = tid / (shape.tx * shape.ty);
        if (a.tid_x < r) {
            a.ib = bounds.xb + a.tid_x * (q + 1);
            a.ie = a.ib + q + 1;
        } else {
            a.ib = bounds.xb + r * (q + 1) + (a.tid_x - r) * q;
            a.ie = a.ib + q;
        }
        if (shape.ty == 1) {
            a.yb = bounds.yb;
            a.ye = bounds.ye;
            a.b_inc = radius;
            a.e_inc = radius;
        } else if (a.tid_y == 0) {
            a.yb = bounds.yb;
            a.ye = mid;
            a.b_inc = radius;
            a.e_inc = 0;
        } else {
            a.yb = mid;
            a.ye = bounds.ye;
            a.b_inc = 0;
            a.e_inc = radius;
        }
        a.zbi = chunk * a.tid_z;
        a.zei = chunk * (a.tid_z + 1);
    }
    return out;
}

UpdateLedger::UpdateLedger(const GridSpec& grid, long steps, bool track_owners)
    : nx_(grid.nx), ny_(grid.ny), nz_(grid.nz), steps_(steps),
      counts_(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz * steps),
      owners_(track_owners ? counts_.size() : 0) {}

void UpdateLedger::record(long t, int z, int y, int x, int owner) {
    const std::size_t at = index(t, z, y, x);
    counts_[at].fetch_add(1, std::memory_order_relaxed);
    if (!owners_.empty()) owners_[at].store(owner, std::memory_order_relaxed);
}

bool UpdateLedger::all_exactly_once() const {
    for (const auto& c : counts_)
        if (c.load(std::memory_order_relaxed) != 1) return false;
    return true;
}

std::uint32_t UpdateLedger::count(long t, int z, int y, int x) const {
    return counts_[index(t, z, y, x)].load(std::memory_order_relaxed);
}

bool UpdateLedger::owner_fixed_per_cell() const {
    if (owners_.empty()) return false;
    const std::size_t cells = static_cast<std::size_t>(nx_) * ny_ * nz_;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        std::int32_t seen = -1;
        for (long t = 0; t < steps_; ++t) {
            const std::size_t at = static_cast<std::size_t>(t) * cells + cell;
            if (counts_[at].load(std::memory_order_relaxed) == 0) continue;
            const std::int32_t o = owners_[at].load(std::memory_order_relaxed);
            if (seen < 0)
                seen = o;
            else if (seen != o)
                return false;
        }
    }
    return true;
}

namespace {

// Synchronization owned by one thread group, reused across tiles.
struct GroupSync {
    explicit GroupSync(const ThreadGroupShape& shape)
        : group(shape.size()), progress(shape.tz) {
        const int sub = shape.tx * shape.ty;
        if (sub > 1)
            for (int p = 0; p < shape.tz; ++p)
                position.push_back(std::make_unique<std::barrier<>>(sub));
    }
    std::barrier<> group;
    std::vector<std::unique_ptr<std::barrier<>>> position;
    std::vector<std::atomic<std::uint64_t>> progress;
    int current_tile = -1;
};

void wait_progress(std::atomic<std::uint64_t>& counter, std::uint64_t need) {
    std::uint64_t seen = counter.load(std::memory_order_acquire);
    while (seen < need) {
        counter.wait(seen, std::memory_order_acquire);
        seen = counter.load(std::memory_order_acquire);
    }
}

struct EngineContext {
    KernelContext kernel;
    const DiamondTessellation* tess = nullptr;
    GridSpec grid;
    int radius = 0;
    long t0 = 0;  // completed steps before this run; tile steps are relative
    int nf = 0;
    int bs_z = 0;
    ThreadGroupShape shape;
    WavefrontVariant variant{};
    UpdateLedger* ledger = nullptr;
};

// This worker's share of the tile's y extent at step t, as up to two
// in-domain intervals (a wrapping tile straddles y = 0).
int my_y_pieces(const EngineContext& ec, const DiamondTile& tile, long t, int tid_y,
                std::pair<int, int> out[2]) {
    auto [yb, ye] = diamond_y_bounds(tile, t, ec.tess->dw, ec.tess->radius);
    if (ec.shape.ty == 2) {
        if (tid_y == 0)
            ye = tile.y_center;
        else
            yb = tile.y_center;
    }
    if (yb >= ye) return 0;
    if (yb >= 0) {
        out[0] = {yb, ye};
        return 1;
    }
    int n = 0;
    if (ye > 0) out[n++] = {0, ye};
    out[n++] = {yb + ec.tess->ny, ec.tess->ny};
    return n;
}

// Updates rows [zlo, zhi) x (worker's y share) x [ib, ie) of tile step t.
// All coordinates interior; the ghost offset is applied here.
void update_slab(const EngineContext& ec, const DiamondTile& tile, long t, int zlo, int zhi,
                 const ThreadAssignment& a) {
    if (zlo >= zhi || a.ib >= a.ie) return;
    std::pair<int, int> pieces[2];
    const int n = my_y_pieces(ec, tile, t, a.tid_y, pieces);
    const int R = ec.radius;
    for (int z = zlo; z < zhi; ++z) {
        for (int p = 0; p < n; ++p) {
            for (int y = pieces[p].first; y < pieces[p].second; ++y) {
                update_row(ec.kernel, ec.t0 + t, z + R, y + R, a.ib, a.ie);
                if (ec.ledger) {
                    const int owner = a.tid_z * (ec.shape.tx * ec.shape.ty) +
                                      a.tid_y * ec.shape.tx + a.tid_x;
                    for (int i = a.ib; i < a.ie; ++i) ec.ledger->record(t, z, y, i - R, owner);
                }
            }
        }
    }
}

void execute_tile_fed(const EngineContext& ec, GroupSync& sync, const ThreadAssignment& a,
                      const DiamondTile& tile) {
    const long S = tile.steps();
    const int R = ec.radius;
    const int bs = ec.bs_z;
    const int chunk = bs / ec.shape.tz;
    const int nz = ec.grid.nz;
    const long blocks = (nz + (S - 1) * R + bs - 1) / bs;
    for (long b = 0; b < blocks; ++b) {
        const int zi = static_cast<int>(b) * bs;  // block base, interior coords
        for (long s = 0; s < S; ++s) {
            const int kt = zi - static_cast<int>(s) * R;
            const int wlo = std::max(kt, 0);
            const int whi = std::min(kt + bs, nz);
            if (wlo < whi) {
                // fixed ownership: thread tid_z owns chunks (z/chunk) % T_z,
                // independent of where the window currently sits
                for (int q = wlo / chunk; q * chunk < whi; ++q) {
                    if (q % ec.shape.tz != a.tid_z) continue;
                    const int zlo = std::max(wlo, q * chunk);
                    const int zhi = std::min(whi, (q + 1) * chunk);
                    update_slab(ec, tile, tile.t_begin + s, zlo, zhi, a);
                }
            }
            sync.group.arrive_and_wait();
        }
    }
}

void execute_tile_relaxed(const EngineContext& ec, GroupSync& sync, const ThreadAssignment& a,
                          const DiamondTile& tile) {
    const long S = tile.steps();
    const int R = ec.radius;
    const int nz = ec.grid.nz;
    const int tz = ec.shape.tz;
    const int p = a.tid_z;
    const bool subgroup = ec.shape.tx * ec.shape.ty > 1;
    const int left = (p + tz - 1) % tz;
    for (long s = p; s < S; s += tz) {
        const std::uint64_t round = static_cast<std::uint64_t>(s) / tz;
        for (int zlo = 0; zlo < nz; zlo += ec.nf) {
            const int zhi = std::min(zlo + ec.nf, nz);
            if (s > 0 && tz > 1) {
                const std::uint64_t left_round = static_cast<std::uint64_t>(s - 1) / tz;
                const std::uint64_t cells = std::min<std::uint64_t>(zhi + R, nz);
                wait_progress(sync.progress[left], left_round * nz + cells);
            }
            update_slab(ec, tile, tile.t_begin + s, zlo, zhi, a);
            if (subgroup) sync.position[p]->arrive_and_wait();
            if (a.tid_x == 0 && a.tid_y == 0) {
                const std::uint64_t done = round * nz + zhi;
                assert(done > sync.progress[p].load(std::memory_order_relaxed));
                sync.progress[p].store(done, std::memory_order_release);
                sync.progress[p].notify_all();
            }
        }
    }
}

void execute_tile(const EngineContext& ec, GroupSync& sync, const ThreadAssignment& a,
                  const DiamondTile& tile) {
    if (ec.variant == WavefrontVariant::FixedExecutionToData)
        execute_tile_fed(ec, sync, a, tile);
    else
        execute_tile_relaxed(ec, sync, a, tile);
}

int resolve_block_size(const WavefrontSpec& wf, int dw, int radius, int tz, int nz) {
    const int ww = wavefront_width(dw, wf.nf, radius);
    int bs = wf.bs_z > 0 ? wf.bs_z : default_block_size(ww, tz);
    if (wf.bs_z <= 0) {
        // a derived block deeper than the domain would leave z chunks with no
        // cells; cap it at nz rounded up to the split granularity
        const int unit = default_block_size(1, tz);
        const int cap = std::max(unit, (nz + unit - 1) / unit * unit);
        bs = std::min(bs, cap);
    }
    if (bs < tz || bs % tz != 0)
        throw std::invalid_argument("wavefront block size must be a positive multiple of T_z");
    return bs;
}

void validate_shape(const ThreadGroupShape& shape) {
    if (shape.tx < 1 || shape.ty < 1 || shape.tz < 1)
        throw std::invalid_argument("thread group axes must be positive");
    if (shape.ty > 2) throw std::invalid_argument("T_y must be 1 or 2");
    if (shape.tc != 1) throw std::invalid_argument("T_c must be 1 for scalar stencils");
}

} // namespace

void update_tile(ProblemState& state, const DiamondTessellation& tess, int tile_id,
                 const WavefrontSpec& wf, const ThreadGroupShape& shape, WavefrontVariant variant,
                 UpdateLedger* ledger) {
    validate_shape(shape);
    EngineContext ec;
    ec.kernel = make_kernel_context(state);
    ec.tess = &tess;
    ec.grid = state.grid;
    ec.radius = state.radius;
    ec.t0 = state.t_current;
    ec.nf = wf.nf;
    ec.bs_z = resolve_block_size(wf, tess.dw, tess.radius, shape.tz, state.grid.nz);
    ec.shape = shape;
    ec.variant = variant;
    ec.ledger = ledger;

    const TileBounds bounds{state.radius, state.radius + state.grid.nx, 0, state.grid.ny, ec.bs_z};
    auto assignments = decompose(bounds, shape, state.radius);
    GroupSync sync(shape);
    const DiamondTile& tile = tess.tiles[tile_id];

    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mu;
    workers.reserve(shape.size());
    for (int w = 0; w < shape.size(); ++w)
        workers.emplace_back([&, w] {
            try {
                execute_tile(ec, sync, assignments[w], tile);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    for (auto& th : workers) th.join();
    if (error) std::rethrow_exception(error);
}

PerfReport run(ProblemState& state, long steps, int dw, const WavefrontSpec& wf,
               const ThreadGroupShape& shape, WavefrontVariant variant, int n_groups,
               const RunOptions& opts) {
    validate_shape(shape);
    if (n_groups < 1) throw std::invalid_argument("need at least one thread group");
    if (steps < 0) throw std::invalid_argument("negative step count");

    PerfReport report;
    report.lups = static_cast<long long>(state.grid.nx) * state.grid.ny * state.grid.nz * steps;
    if (steps == 0) return report;

    DiamondTessellation tess = build_tessellation(state.grid.ny, steps, dw, state.radius);
    report.tiles = static_cast<long long>(tess.tiles.size());

    EngineContext ec;
    ec.kernel = make_kernel_context(state);
    ec.tess = &tess;
    ec.grid = state.grid;
    ec.radius = state.radius;
    ec.t0 = state.t_current;
    ec.nf = wf.nf;
    ec.bs_z = resolve_block_size(wf, dw, state.radius, shape.tz, state.grid.nz);
    ec.shape = shape;
    ec.variant = variant;
    ec.ledger = opts.ledger;

#ifndef NDEBUG
    std::unique_ptr<UpdateLedger> debug_ledger;
    if (!ec.ledger) {
        debug_ledger = std::make_unique<UpdateLedger>(state.grid, steps);
        ec.ledger = debug_ledger.get();
    }
#endif

    const TileBounds bounds{state.radius, state.radius + state.grid.nx, 0, state.grid.ny, ec.bs_z};
    auto assignments = decompose(bounds, shape, state.radius);

    TileScheduler scheduler(tess, opts.trace_out != nullptr);
    scheduler.seed_ready();

    std::vector<std::unique_ptr<GroupSync>> groups;
    for (int g = 0; g < n_groups; ++g) groups.push_back(std::make_unique<GroupSync>(shape));

    // Configuration is fully validated before any thread starts; an exception
    // past this point is a broken scheduling contract. Peers may already be
    // blocked on barriers, so a clean unwind is impossible.
    auto worker = [&](int g, int w) {
        GroupSync& sync = *groups[g];
        try {
            while (true) {
                if (w == 0) {
                    auto tile = scheduler.pop_wait();
                    sync.current_tile = tile ? *tile : -1;
                    if (tile) scheduler.mark_start(*tile, g);
                    for (auto& c : sync.progress) c.store(0, std::memory_order_relaxed);
                }
                sync.group.arrive_and_wait();
                const int tile = sync.current_tile;
                if (tile < 0) break;
                execute_tile(ec, sync, assignments[w], tess.tiles[tile]);
                sync.group.arrive_and_wait();
                if (w == 0) scheduler.complete(tile);
            }
        } catch (const std::exception& e) {
            std::fprintf(stderr, "girih engine worker %d.%d: %s\n", g, w, e.what());
            std::terminate();
        }
    };

    const auto start = std::chrono::steady_clock::now();
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_groups) * shape.size());
    for (int g = 0; g < n_groups; ++g)
        for (int w = 0; w < shape.size(); ++w) threads.emplace_back(worker, g, w);
    for (auto& th : threads) th.join();
    const auto stop = std::chrono::steady_clock::now();

    state.t_current += steps;
    report.wall_seconds = std::chrono::duration<double>(stop - start).count();
    report.glups = report.wall_seconds > 0 ? report.lups / report.wall_seconds / 1e9 : 0.0;

#ifndef NDEBUG
    if (debug_ledger) assert(debug_ledger->all_exactly_once());
#endif
    if (opts.trace_out) scheduler.dump_trace_csv(*opts.trace_out);
    return report;
}

} // namespace girih
