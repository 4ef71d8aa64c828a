#include "girih/scheduler.hpp"

#include <chrono>
#include <ostream>
#include <stdexcept>

namespace girih {

namespace {
std::uint64_t now_ns() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}
} // namespace

TileScheduler::TileScheduler(const DiamondTessellation& tess, bool record_trace)
    : dependents_(tess.dependents), record_trace_(record_trace) {
    const int n = static_cast<int>(tess.tiles.size());
    remaining_.resize(n);
    state_.assign(n, TileState::Blocked);
    for (int i = 0; i < n; ++i) remaining_[i] = static_cast<int>(tess.deps[i].size());
    if (record_trace_) trace_.resize(n);
}

void TileScheduler::seed_ready() {
    std::lock_guard lock(mu_);
    if (seeded_) throw std::logic_error("scheduler: seeded twice");
    seeded_ = true;
    for (int i = 0; i < static_cast<int>(remaining_.size()); ++i)
        if (remaining_[i] == 0) {
            state_[i] = TileState::Queued;
            ready_.push_back(i);
        }
    cv_.notify_all();
}

PopStatus TileScheduler::try_pop(int& tile) {
    std::lock_guard lock(mu_);
    if (!ready_.empty()) {
        tile = ready_.front();
        ready_.pop_front();
        state_[tile] = TileState::Popped;
        if (record_trace_) trace_[tile].start_ns = now_ns();
        return PopStatus::Got;
    }
    return completed_ == static_cast<int>(state_.size()) ? PopStatus::Done : PopStatus::Empty;
}

std::optional<int> TileScheduler::pop_wait() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !ready_.empty() || completed_ == static_cast<int>(state_.size()); });
    if (ready_.empty()) return std::nullopt;
    const int tile = ready_.front();
    ready_.pop_front();
    state_[tile] = TileState::Popped;
    if (record_trace_) trace_[tile].start_ns = now_ns();
    return tile;
}

std::vector<int> TileScheduler::complete(int tile) {
    std::vector<int> newly_ready;
    {
        std::lock_guard lock(mu_);
        if (tile < 0 || tile >= static_cast<int>(state_.size()))
            throw std::logic_error("scheduler: unknown tile completed");
        if (state_[tile] != TileState::Popped)
            throw std::logic_error("scheduler: complete() on a tile that is not in flight");
        state_[tile] = TileState::Completed;
        ++completed_;
        if (record_trace_) trace_[tile].end_ns = now_ns();
        for (int d : dependents_[tile]) {
            if (--remaining_[d] == 0) {
                state_[d] = TileState::Queued;
                ready_.push_back(d);
                newly_ready.push_back(d);
            }
        }
    }
    cv_.notify_all();
    return newly_ready;
}

void TileScheduler::mark_start(int tile, int group) {
    if (!record_trace_) return;
    std::lock_guard lock(mu_);
    trace_[tile].tile = tile;
    trace_[tile].group = group;
}

bool TileScheduler::drained() const {
    std::lock_guard lock(mu_);
    return completed_ == static_cast<int>(state_.size());
}

void TileScheduler::dump_trace_csv(std::ostream& os) const {
    os << "tile,group,start_ns,end_ns\n";
    for (std::size_t i = 0; i < trace_.size(); ++i)
        os << i << ',' << trace_[i].group << ',' << trace_[i].start_ns << ',' << trace_[i].end_ns
           << '\n';
}

} // namespace girih
