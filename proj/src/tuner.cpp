#include "girih/tuner.hpp"

#include "girih/geometry.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>

namespace girih {

namespace {

std::vector<int> divisors_descending(int n) {
    std::vector<int> out;
    for (int d = n; d >= 1; --d)
        if (n % d == 0) out.push_back(d);
    return out;
}

} // namespace

std::vector<ThreadGroupShape> enumerate_shapes(int group_size, int components) {
    if (group_size < 1) throw std::invalid_argument("enumerate_shapes: group size must be positive");
    std::vector<ThreadGroupShape> out;
    for (int tc = 1; tc <= group_size; ++tc) {
        if (group_size % tc != 0 || components % tc != 0) continue;
        const int rem = group_size / tc;
        for (int tx = rem; tx >= 1; --tx) {
            if (rem % tx != 0) continue;
            const int yz = rem / tx;
            for (int ty = 2; ty >= 1; --ty) {
                if (ty > 2 || yz % ty != 0) continue;
                out.push_back({tx, ty, yz / ty, tc});
            }
        }
    }
    return out;
}

bool prune_keep(const TuningPoint& point, long long n_xb, int nd, int radius, long long budget) {
    if (budget <= 0) return true;
    const CacheModelInput in{n_xb, point.dw, point.nf, radius, nd};
    return cache_block_size(in) * point.n_groups <= budget;
}

double adaptive_measure(TuningPoint& point, const MeasureFn& raw, const TuneConfig& cfg) {
    if (cfg.stability_threshold <= 0 || cfg.stability_threshold >= 1)
        throw std::invalid_argument("adaptive_measure: stability threshold must be in (0,1)");
    if (cfg.max_repeats < 1) throw std::invalid_argument("adaptive_measure: need max_repeats >= 1");
    long rows = 1;
    double last = raw(point, rows);
    int repeats = 1;
    bool stable = false;
    while (repeats < cfg.max_repeats) {
        rows *= 2;
        const double next = raw(point, rows);
        ++repeats;
        const double base = std::max(std::abs(last), 1e-300);
        const bool close = std::abs(next - last) / base < cfg.stability_threshold;
        last = next;
        if (close) {
            stable = true;
            break;
        }
    }
    point.measured_glups = last;
    point.test_rows = rows;
    point.low_confidence = !stable;
    return last;
}

TuningPoint hill_climb(const TuningPoint& start,
                       const std::function<std::vector<TuningPoint>(const TuningPoint&)>& neighbors,
                       const std::function<double(TuningPoint&)>& measure) {
    TuningPoint best = start;
    double best_score = measure(best);
    // memoize on (dw, nf): a deterministic measure makes revisits pointless
    std::map<std::pair<int, int>, double> seen;
    seen[{best.dw, best.nf}] = best_score;
    while (true) {
        TuningPoint next = best;
        double next_score = best_score;
        bool improved = false;
        for (TuningPoint cand : neighbors(best)) {
            const auto key = std::make_pair(cand.dw, cand.nf);
            double score;
            if (auto it = seen.find(key); it != seen.end()) {
                score = it->second;
            } else {
                score = measure(cand);
                seen.emplace(key, score);
            }
            if (score > next_score) {  // strict: plateau keeps the incumbent
                next = cand;
                next_score = score;
                improved = true;
            }
        }
        if (!improved) return best;
        best = next;
        best_score = next_score;
    }
}

namespace {

struct SearchSpace {
    int radius;
    int ny;
    int nd;
    long long n_xb;
    int dw_lo, dw_hi;
    int nf_lo, nf_hi;
    long long budget;

    bool dw_admissible(int dw) const {
        return dw >= dw_lo && dw <= dw_hi && dw % (2 * radius) == 0 && ny % dw == 0;
    }
    bool keep(const TuningPoint& p) const { return prune_keep(p, n_xb, nd, radius, budget); }
    std::vector<TuningPoint> neighbors(const TuningPoint& p) const {
        std::vector<TuningPoint> out;
        const int step = 2 * radius;
        // D_w moves in 2R steps to the nearest admissible width: the Ny
        // divisibility constraint leaves gaps a single step would not cross
        for (int dir : {-1, +1}) {
            for (int dw = p.dw + dir * step; dw >= dw_lo && dw <= dw_hi; dw += dir * step) {
                if (!dw_admissible(dw)) continue;
                TuningPoint q = p;
                q.dw = dw;
                if (keep(q)) out.push_back(q);
                break;
            }
        }
        for (int dnf : {-1, 1}) {
            TuningPoint q = p;
            q.nf += dnf;
            if (q.nf >= nf_lo && q.nf <= nf_hi && keep(q)) out.push_back(q);
        }
        return out;
    }
};

} // namespace

TuneResult tune(StencilKind kind, const GridSpec& grid, const MachineSpec& machine,
                int total_threads, WavefrontVariant variant, const TuneConfig& cfg,
                const MeasureFn& raw_measure) {
    if (total_threads < 1) throw std::invalid_argument("tune: need a positive thread budget");
    if (cfg.nf_min < 1 || cfg.nf_max < cfg.nf_min)
        throw std::invalid_argument("tune: empty wavefront width range");
    const StencilTraits& tr = traits(kind);

    SearchSpace space;
    space.radius = tr.radius;
    space.ny = grid.ny;
    space.nd = tr.domain_streams;
    space.n_xb = grid.leading_dim_bytes(tr.radius);
    space.dw_lo = cfg.dw_min > 0 ? cfg.dw_min : 2 * tr.radius;
    space.dw_hi = cfg.dw_max > 0 ? std::min(cfg.dw_max, grid.ny) : grid.ny;
    space.nf_lo = cfg.nf_min;
    space.nf_hi = cfg.nf_max;
    space.budget = cfg.cache_budget_bytes != 0 ? cfg.cache_budget_bytes
                                               : static_cast<long long>(machine.usable_cache_bytes);

    TuneResult result;
    bool have_best = false;
    for (int group_size : divisors_descending(total_threads)) {
        const int n_groups = total_threads / group_size;
        for (const ThreadGroupShape& shape : enumerate_shapes(group_size)) {
            if (shape.tx > grid.nx) continue;  // engine precondition
            ++result.shapes_tried;

            // start at the largest admissible diamond the cache model accepts
            TuningPoint start;
            start.shape = shape;
            start.variant = variant;
            start.n_groups = n_groups;
            start.nf = space.nf_lo;
            start.dw = 0;
            for (int dw = space.dw_hi - space.dw_hi % (2 * tr.radius); dw >= space.dw_lo;
                 dw -= 2 * tr.radius) {
                TuningPoint probe = start;
                probe.dw = dw;
                if (!space.dw_admissible(dw)) continue;
                if (!space.keep(probe)) {
                    ++result.pruned;
                    continue;
                }
                start.dw = dw;
                break;
            }
            if (start.dw == 0) continue;  // every width pruned for this shape

            auto measure = [&](TuningPoint& p) {
                const double g = adaptive_measure(p, raw_measure, cfg);
                result.log.push_back(p);
                return g;
            };
            auto neighbors = [&](const TuningPoint& p) { return space.neighbors(p); };
            TuningPoint local = hill_climb(start, neighbors, measure);
            if (!have_best || local.measured_glups > result.best.measured_glups) {
                result.best = local;
                have_best = true;
            }
        }
    }
    if (!have_best) throw std::runtime_error("tune: no feasible tuning point");
    return result;
}

MeasureFn make_engine_measure(StencilKind kind, const GridSpec& grid, std::uint64_t seed) {
    auto scratch = std::make_shared<std::unique_ptr<ProblemState>>();
    return [kind, grid, seed, scratch](const TuningPoint& p, long rows) {
        if (!*scratch) *scratch = std::make_unique<ProblemState>(init_state(kind, grid, seed));
        ProblemState& state = **scratch;
        const long steps = rows * (p.dw / (2 * state.radius));
        WavefrontSpec wf;
        wf.nf = p.nf;
        const PerfReport rep = run(state, steps, p.dw, wf, p.shape, p.variant, p.n_groups);
        return rep.glups;
    };
}

std::vector<TuningPoint> enumerate_candidates(int total_threads, WavefrontVariant variant,
                                              int components) {
    std::vector<TuningPoint> out;
    for (int group_size : divisors_descending(total_threads))
        for (const ThreadGroupShape& shape : enumerate_shapes(group_size, components)) {
            TuningPoint p;
            p.shape = shape;
            p.variant = variant;
            p.n_groups = total_threads / group_size;
            out.push_back(p);
        }
    return out;
}

} // namespace girih
