#include "girih/models.hpp"

#include "girih/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace girih {

long long cache_block_size(const CacheModelInput& in) {
    if (in.n_xb <= 0 || in.nd <= 0) throw std::invalid_argument("cache_block_size: inputs must be positive");
    const long long ww = wavefront_width(in.dw, in.nf, in.radius);
    const long long area = static_cast<long long>(in.nd) * in.dw * (in.dw / 2 - in.radius + in.nf);
    const long long halo = 2LL * in.radius * (in.dw + ww);
    return in.n_xb * (area + halo);
}

long long cache_block_size_first_order(long long n_xb, int dw, int nf, int nd) {
    const long long ww = wavefront_width(dw, nf, 1);
    const long long area = nd * (static_cast<long long>(dw) * dw / 2 + static_cast<long long>(dw) * (nf - 1));
    const long long halo = 2LL * (dw + ww);
    return n_xb * (area + halo);
}

double code_balance(int dw, int nd, int radius) {
    if (dw < 2 * radius || radius < 1 || nd < 1)
        throw std::invalid_argument("code_balance: need D_w >= 2R, R >= 1, N_D >= 1");
    const long long writes = 2LL * dw - 2LL * radius;
    const long long reads = static_cast<long long>(nd) * dw + 2LL * radius;
    return 16.0 * radius * static_cast<double>(writes + reads) / (static_cast<double>(dw) * dw);
}

double code_balance_first_order(int dw, int nd) {
    const long long writes = 2LL * dw - 2;
    const long long reads = static_cast<long long>(nd) * dw + 2;
    return 16.0 * static_cast<double>(writes + reads) / (static_cast<double>(dw) * dw);
}

double spatial_balance(StencilKind kind) {
    switch (kind) {
    case StencilKind::Const7pt: return 24.0;
    case StencilKind::Var7pt: return 80.0;
    case StencilKind::Const25pt: return 32.0;
    case StencilKind::Var25pt: return 128.0;
    }
    return 0.0;
}

double ecm_cycles(const EcmModel& m, DataPath depth) {
    double t_data = 0;
    if (depth >= DataPath::L2) t_data += m.t_l1l2;
    if (depth >= DataPath::L3) t_data += m.t_l2l3;
    if (depth >= DataPath::Mem) t_data += m.t_l3mem;
    return std::max(m.t_nol + t_data, m.t_ol);
}

std::array<double, 4> ecm_chain(const EcmModel& m) {
    return {ecm_cycles(m, DataPath::L1), ecm_cycles(m, DataPath::L2), ecm_cycles(m, DataPath::L3),
            ecm_cycles(m, DataPath::Mem)};
}

MulticorePrediction ecm_multicore(const EcmModel& m, const MachineSpec& mach, int cores) {
    if (cores < 1 || cores > mach.cores)
        throw std::invalid_argument("ecm_multicore: core count outside machine range");
    MulticorePrediction p;
    const double t_mem = ecm_cycles(m, DataPath::Mem);
    p.linear_glups = cores * m.w_unit * mach.clock_ghz / t_mem;
    if (m.t_l3mem <= 0) {
        p.glups = p.linear_glups;  // no memory term: compute bound, no saturation
        return p;
    }
    p.saturation_glups = m.w_unit * mach.clock_ghz / m.t_l3mem;
    p.saturation_cores = static_cast<int>(std::ceil(t_mem / m.t_l3mem));
    p.bandwidth_bound = p.saturation_glups <= p.linear_glups;
    p.glups = std::min(p.linear_glups, p.saturation_glups);
    return p;
}

double roofline(double intensity, double bandwidth) {
    if (intensity <= 0) throw std::invalid_argument("roofline: intensity must be positive");
    return intensity * bandwidth;
}

double report_round(double x) {
    if (x == 0) return 0;
    const double mag = std::floor(std::log10(std::fabs(x)));
    const double scale = std::pow(10.0, 1 - mag);
    return std::round(x * scale) / scale;
}

MachineSpec MachineSpec::builtin(const std::string& name) {
    MachineSpec m;
    if (name == "ivybridge-e5-2660v2") {
        m = {name, 2.2, 40.0, 10, 25.0 * 1024 * 1024, 0};
    } else if (name == "haswell-e5-2699v3") {
        m = {name, 2.3, 50.0, 18, 45.0 * 1024 * 1024, 0};
    } else {
        throw std::invalid_argument("unknown machine: " + name);
    }
    m.usable_cache_bytes = m.l3_bytes / 2;  // half the cache is usable for blocking
    return m;
}

std::vector<std::string> MachineSpec::builtin_names() {
    return {"ivybridge-e5-2660v2", "haswell-e5-2699v3"};
}

MachineSpec MachineSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open machine file: " + path);
    MachineSpec m;
    m.name = path;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) continue;
        if (key == "name") {
            m.name = val;
            continue;
        }
        double num = 0;
        try {
            num = std::stod(val);
        } catch (const std::exception&) {
            throw std::runtime_error("machine file: bad value for " + key);
        }
        if (key == "clock_ghz")
            m.clock_ghz = num;
        else if (key == "bandwidth_gbps")
            m.bandwidth_gbps = num;
        else if (key == "cores")
            m.cores = static_cast<int>(num);
        else if (key == "l3_mib")
            m.l3_bytes = num * 1024 * 1024;
        else if (key == "usable_cache_mib")
            m.usable_cache_bytes = num * 1024 * 1024;
        else
            throw std::runtime_error("machine file: unknown key " + key);
    }
    if (m.clock_ghz <= 0 || m.bandwidth_gbps <= 0 || m.cores <= 0 || m.l3_bytes <= 0)
        throw std::runtime_error("machine file: clock_ghz, bandwidth_gbps, cores, l3_mib required");
    if (m.usable_cache_bytes <= 0) m.usable_cache_bytes = m.l3_bytes / 2;
    return m;
}

const std::vector<ReferencePrediction>& reference_predictions() {
    static const std::vector<ReferencePrediction> rows = {
        {"ivybridge-e5-2660v2", StencilKind::Const7pt, {12, 14, 14, 8.3, 2.2, 8}, 4.6},
        {"ivybridge-e5-2660v2", StencilKind::Var7pt, {14, 28, 30, 24, 11, 8}, 1.6},
        {"ivybridge-e5-2660v2", StencilKind::Const25pt, {12, 56, 40, 28, 11, 8}, 1.3},
        {"ivybridge-e5-2660v2", StencilKind::Var25pt, {12, 76, 115, 50, 40, 8}, 0.44},
        {"haswell-e5-2699v3", StencilKind::Const7pt, {12, 14, 7, 7.5, 1.8, 8}, 10},
        {"haswell-e5-2699v3", StencilKind::Var7pt, {14, 21, 14, 25, 4.8, 8}, 3.9},
        {"haswell-e5-2699v3", StencilKind::Const25pt, {12, 56, 20, 30, 7.4, 8}, 2.5},
        {"haswell-e5-2699v3", StencilKind::Var25pt, {12, 38, 56, 50, 26, 8}, 0.71},
    };
    return rows;
}

} // namespace girih
