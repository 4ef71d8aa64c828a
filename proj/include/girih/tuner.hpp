/// @file tuner.hpp
/// @brief Auto-tunes (D_w, N_F, thread-group shape) per stencil, grid, and
///        machine: shape enumeration by thread factorization, hill-climbing
///        local search over tile widths, cache-model pruning, and adaptive
///        test sizing.

#pragma once

#include "girih/engine.hpp"
#include "girih/models.hpp"
#include "girih/stencil.hpp"

#include <functional>
#include <vector>

namespace girih {

/// One candidate configuration with its measurement.
struct TuningPoint {
    int dw = 0;
    int nf = 1;
    ThreadGroupShape shape;
    WavefrontVariant variant = WavefrontVariant::RelaxedPipelined;
    int n_groups = 1;
    double measured_glups = 0;
    long test_rows = 0;
    bool low_confidence = false;
};

struct TuneConfig {
    double stability_threshold = 0.05;  // relative variation accepted between repetitions
    int max_repeats = 6;
    long long cache_budget_bytes = 0;  // 0: unlimited (pruning disabled)
    int dw_min = 0;                    // 0: smallest admissible (2R)
    int dw_max = 0;                    // 0: Ny
    int nf_min = 1;
    int nf_max = 8;
};

/// All shapes with T_c * T_x * T_y * T_z equal to the group size, T_y <= 2 and
/// T_c dividing the per-cell component count. Deterministic order: T_c
/// ascending, then T_x descending, then T_y descending.
std::vector<ThreadGroupShape> enumerate_shapes(int group_size, int components = 1);

/// Model-based pruning: keep a point only when its cache block size times the
/// number of concurrently running tiles fits the budget. budget <= 0 keeps all.
bool prune_keep(const TuningPoint& point, long long n_xb, int nd, int radius, long long budget);

/// Raw measurement: GLUP/s of running `rows` diamond rows at a configuration.
using MeasureFn = std::function<double(const TuningPoint&, long rows)>;

/// Doubles the test size (diamond rows) until two successive measurements
/// agree within the stability threshold or max_repeats is reached. Fills
/// measured_glups, test_rows and low_confidence on the point.
double adaptive_measure(TuningPoint& point, const MeasureFn& raw, const TuneConfig& cfg);

/// Axis-aligned local search; moves only on strict improvement, so the
/// first-encountered point wins a plateau. Deterministic given a
/// deterministic measure. The measure fills the point it is given.
TuningPoint hill_climb(const TuningPoint& start,
                       const std::function<std::vector<TuningPoint>(const TuningPoint&)>& neighbors,
                       const std::function<double(TuningPoint&)>& measure);

struct TuneResult {
    TuningPoint best;
    std::vector<TuningPoint> log;  // every measured point
    long long pruned = 0;
    long long shapes_tried = 0;
};

/// Full search: enumerates group sizes (divisors of the thread budget) and
/// shapes, hill-climbs (D_w, N_F) per shape with model pruning, and returns
/// the throughput argmax. Throws std::runtime_error when nothing is feasible.
TuneResult tune(StencilKind kind, const GridSpec& grid, const MachineSpec& machine,
                int total_threads, WavefrontVariant variant, const TuneConfig& cfg,
                const MeasureFn& raw_measure);

/// Measurement backed by the real engine on scratch state owned by the
/// returned callable (allocated lazily, freed with it).
MeasureFn make_engine_measure(StencilKind kind, const GridSpec& grid, std::uint64_t seed);

/// Enumerated-only view for dry runs: candidate shapes per divisor group size.
std::vector<TuningPoint> enumerate_candidates(int total_threads, WavefrontVariant variant,
                                              int components = 1);

} // namespace girih
