/// @file models.hpp
/// @brief Analytic performance models: wavefront-diamond cache block size,
///        memory-traffic code balance, ECM cycle decomposition with multicore
///        saturation, and the Roofline bound. Pure functions over exact
///        integer arithmetic where possible; rounding happens only at the
///        reporting boundary.

#pragma once

#include "girih/stencil.hpp"

#include <array>
#include <string>
#include <vector>

namespace girih {

/// Inputs of the cache-block-size model.
struct CacheModelInput {
    long long n_xb = 0;  // bytes in the leading dimension
    int dw = 0;          // diamond width (cells)
    int nf = 0;          // wavefront tile width (cells)
    int radius = 0;      // stencil radius
    int nd = 0;          // domain-sized streams
};

/// C_S = N_xb * [N_D * D_w * (D_w/2 - R + N_F) + 2R * (D_w + W_w)] bytes.
/// Exact integer result.
long long cache_block_size(const CacheModelInput& in);

/// First-order specialization C_S = N_xb * [N_D*(D_w^2/2 + D_w*(N_F-1)) + 2*(D_w + W_w)].
/// Algebraically identical to cache_block_size at R = 1; kept as the second
/// route for the identity check.
long long cache_block_size_first_order(long long n_xb, int dw, int nf, int nd);

/// B_C = 16R * [(2D_w - 2R) + (N_D * D_w + 2R)] / D_w^2 bytes/LUP.
double code_balance(int dw, int nd, int radius);

/// First-order form 16 * [(2D_w - 2) + (N_D * D_w + 2)] / D_w^2; the second
/// route for the R = 1 identity check.
double code_balance_first_order(int dw, int nd);

/// Main-memory bytes/LUP of an optimal purely spatial blocking of each kind.
double spatial_balance(StencilKind kind);

/// Cycles per unit of work for each level of the memory hierarchy, in the
/// shorthand {T_OL || T_nOL | T_L1L2 | T_L2L3 | T_L3Mem}. One unit of work is
/// W_unit lattice updates (8 for double precision: one cache line of results).
struct EcmModel {
    double t_ol = 0;
    double t_nol = 0;
    double t_l1l2 = 0;
    double t_l2l3 = 0;
    double t_l3mem = 0;
    double w_unit = 8;
};

enum class DataPath { L1, L2, L3, Mem };

/// T_ECM = max(T_nOL + T_data, T_OL) with T_data summed down to the given level.
double ecm_cycles(const EcmModel& m, DataPath depth);

/// Full prediction chain {L1 ] L2 ] L3 ] Mem} in cycles.
std::array<double, 4> ecm_chain(const EcmModel& m);

struct MachineSpec {
    std::string name;
    double clock_ghz = 0;
    double bandwidth_gbps = 0;  // saturated memory bandwidth b_S
    int cores = 0;
    double l3_bytes = 0;
    double usable_cache_bytes = 0;  // defaults to half of L3

    static MachineSpec builtin(const std::string& name);
    static MachineSpec from_file(const std::string& path);
    static std::vector<std::string> builtin_names();
};

struct MulticorePrediction {
    double glups = 0;           // min(linear scaling, saturation limit)
    double linear_glups = 0;    // n * W_unit * f / T_ECM(Mem)
    double saturation_glups = 0;  // W_unit * f / T_L3Mem; 0 when compute-bound
    int saturation_cores = 0;   // ceil(T_ECM(Mem) / T_L3Mem); 0 when compute-bound
    bool bandwidth_bound = false;
};

/// Multicore scaling: performance is linear in cores until the memory
/// bandwidth term saturates it. T_L3Mem = 0 marks a compute-bound kernel with
/// no saturation point.
MulticorePrediction ecm_multicore(const EcmModel& m, const MachineSpec& mach, int cores);

/// Roofline bound P = I * b_S.
double roofline(double intensity, double bandwidth);

/// Rounds to two significant digits, the precision model predictions are
/// reported at.
double report_round(double x);

/// One reference prediction: a phenomenological ECM tuple for a stencil on a
/// builtin machine together with its expected full-socket throughput.
struct ReferencePrediction {
    const char* machine;
    StencilKind kind;
    EcmModel model;
    double expected_glups;
};

/// The eight (machine, stencil) reference rows used by regression tests and
/// the CLI model report.
const std::vector<ReferencePrediction>& reference_predictions();

} // namespace girih
