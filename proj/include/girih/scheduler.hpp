/// @file scheduler.hpp
/// @brief Dependency-counting tile scheduler: a multi-producer multi-consumer
///        FIFO of ready tiles. One lock guards queue and counters; contention
///        is negligible because each extruded diamond update is millions of
///        grid points.

#pragma once

#include "girih/geometry.hpp"

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

namespace girih {

enum class PopStatus { Got, Empty, Done };

/// Optional execution trace entry for offline analysis.
struct TileTraceEntry {
    int tile = 0;
    int group = -1;
    std::uint64_t start_ns = 0;
    std::uint64_t end_ns = 0;
};

class TileScheduler {
public:
    explicit TileScheduler(const DiamondTessellation& tess, bool record_trace = false);

    /// Enqueues every tile whose dependency count is already zero.
    void seed_ready();

    /// Non-blocking pop. Done means every tile has completed; Empty means the
    /// queue is momentarily drained but work remains in flight.
    PopStatus try_pop(int& tile);

    /// Blocking pop; returns std::nullopt once all tiles have completed.
    std::optional<int> pop_wait();

    /// Marks a popped tile complete and enqueues dependents whose counts reach
    /// zero; returns the newly ready tile ids. Throws std::logic_error on
    /// completion of a tile that was never popped or was already completed.
    std::vector<int> complete(int tile);

    /// Stamps the executing group onto the trace entry for a popped tile.
    void mark_start(int tile, int group);

    bool drained() const;
    int total_tiles() const { return static_cast<int>(state_.size()); }

    const std::vector<TileTraceEntry>& trace() const { return trace_; }
    void dump_trace_csv(std::ostream& os) const;

private:
    enum class TileState : std::uint8_t { Blocked, Queued, Popped, Completed };

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<int> ready_;
    std::vector<int> remaining_;
    std::vector<std::vector<int>> dependents_;
    std::vector<TileState> state_;
    int completed_ = 0;
    bool seeded_ = false;
    bool record_trace_ = false;
    std::vector<TileTraceEntry> trace_;
};

} // namespace girih
