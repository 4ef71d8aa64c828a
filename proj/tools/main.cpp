// girih: stencil temporal-blocking framework CLI.
// Subcommands: verify (oracle equivalence), run (benchmark records),
// model (analytic cache/traffic/ECM reports), tune (auto-tuner).

#include "girih/engine.hpp"
#include "girih/geometry.hpp"
#include "girih/models.hpp"
#include "girih/scheduler.hpp"
#include "girih/stencil.hpp"
#include "girih/tuner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using nlohmann::json;
using namespace girih;

namespace {

constexpr int kSchemaVersion = 1;

struct Options {
    std::string stencil = "const7pt";
    int nx = 32, ny = 32, nz = 32;
    long nt = 8;
    int dw = 0;  // 0: per-stencil default
    int nf = 4;
    std::string tgs = "1x1x1";
    std::string variant = "relaxed";
    int groups = 1;
    int threads = 0;
    std::uint64_t seed = 42;
    std::string machine;
    std::string machine_file;
    std::string out;
    std::string format = "csv";
    std::string use_tuned;
    bool force = false;
    bool dry_run = false;
    bool all = false;
    bool table12 = false;
    bool inject_fault = false;
};

ThreadGroupShape parse_tgs(const std::string& s) {
    ThreadGroupShape shape;
    char x1 = 0, x2 = 0;
    std::istringstream in(s);
    if (!(in >> shape.tx >> x1 >> shape.ty >> x2 >> shape.tz) || x1 != 'x' || x2 != 'x')
        throw CLI::ValidationError("--tgs expects TxXTyXTz, e.g. 2x1x2");
    return shape;
}

std::string tgs_string(const ThreadGroupShape& s) {
    std::ostringstream os;
    os << s.tx << 'x' << s.ty << 'x' << s.tz;
    return os.str();
}

int default_dw(StencilKind kind) { return traits(kind).radius == 1 ? 8 : 16; }

int resolve_threads(const Options& opt) {
    if (opt.threads > 0) return opt.threads;
    if (const char* env = std::getenv("GIRIH_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

// budget check applies only when the user stated a budget
void check_thread_budget(const Options& opt, const ThreadGroupShape& shape, int groups) {
    int budget = opt.threads;
    if (budget <= 0) {
        if (const char* env = std::getenv("GIRIH_THREADS")) budget = std::atoi(env);
    }
    if (budget > 0 && groups * shape.size() > budget)
        throw std::runtime_error("thread budget exceeded: groups * tgs size = " +
                                 std::to_string(groups * shape.size()) + " > " +
                                 std::to_string(budget));
}

std::optional<MachineSpec> resolve_machine(const Options& opt) {
    if (!opt.machine_file.empty()) return MachineSpec::from_file(opt.machine_file);
    if (!opt.machine.empty()) return MachineSpec::builtin(opt.machine);
    return std::nullopt;
}

GridSpec grid_of(const Options& opt) { return GridSpec{opt.nx, opt.ny, opt.nz, 0}; }

struct VerifyOutcome {
    bool pass = true;
    std::string field;
    int i = 0, j = 0, k = 0;
    double expected = 0, actual = 0;
};

VerifyOutcome compare_states(const ProblemState& oracle, const ProblemState& tiled) {
    VerifyOutcome out;
    const Field* fields[2][2] = {{&oracle.u, &tiled.u}, {&oracle.v, &tiled.v}};
    const char* names[2] = {"u", "v"};
    for (int f = 0; f < 2; ++f) {
        const Field& a = *fields[f][0];
        const Field& b = *fields[f][1];
        for (int k = 0; k < a.z(); ++k)
            for (int j = 0; j < a.y(); ++j)
                for (int i = 0; i < a.x(); ++i)
                    if (a.at(i, j, k) != b.at(i, j, k)) {
                        out.pass = false;
                        out.field = names[f];
                        out.i = i;
                        out.j = j;
                        out.k = k;
                        out.expected = a.at(i, j, k);
                        out.actual = b.at(i, j, k);
                        return out;
                    }
    }
    return out;
}

VerifyOutcome verify_once(StencilKind kind, const GridSpec& grid, long nt, int dw,
                          const WavefrontSpec& wf, const ThreadGroupShape& shape,
                          WavefrontVariant variant, int groups, std::uint64_t seed,
                          bool inject_fault) {
    ProblemState oracle = init_state(kind, grid, seed);
    ProblemState tiled = init_state(kind, grid, seed);
    naive_sweep(oracle, nt);
    run(tiled, nt, dw, wf, shape, variant, groups);
    if (inject_fault) {
        const int R = tiled.radius;
        tiled.current().at(R + grid.nx / 2, R + grid.ny / 2, R + grid.nz / 2) += 1.0;
    }
    return compare_states(oracle, tiled);
}

int cmd_verify(const Options& opt) {
    const WavefrontSpec wf{opt.nf, 0};
    struct Case {
        StencilKind kind;
        ThreadGroupShape shape;
    };
    std::vector<Case> cases;
    if (opt.all) {
        for (int s = 0; s < 4; ++s)
            for (const ThreadGroupShape& shape : enumerate_shapes(6))
                cases.push_back({static_cast<StencilKind>(s), shape});
    } else {
        cases.push_back({stencil_from_name(opt.stencil), parse_tgs(opt.tgs)});
    }

    int failures = 0;
    for (const Case& c : cases) {
        const int dw = opt.dw > 0 ? opt.dw : default_dw(c.kind);
        const GridSpec grid = grid_of(opt);
        const WavefrontVariant variant = variant_from_name(opt.variant);
        std::ostringstream label;
        label << traits(c.kind).name << ' ' << grid.nx << 'x' << grid.ny << 'x' << grid.nz
              << " nt=" << opt.nt << " dw=" << dw << " tgs=" << tgs_string(c.shape)
              << " variant=" << opt.variant << " groups=" << opt.groups;
        try {
            check_thread_budget(opt, c.shape, opt.groups);
            const VerifyOutcome v = verify_once(c.kind, grid, opt.nt, dw, wf, c.shape, variant,
                                                opt.groups, opt.seed, opt.inject_fault);
            if (v.pass) {
                std::cout << "PASS " << label.str() << '\n';
            } else {
                ++failures;
                std::cout << "FAIL " << label.str() << " first-diff field=" << v.field << " cell=("
                          << v.i << ',' << v.j << ',' << v.k << ") oracle=" << std::hexfloat
                          << v.expected << " tiled=" << v.actual << std::defaultfloat << '\n';
            }
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "ERROR " << label.str() << ": " << e.what() << '\n';
        }
    }
    return failures == 0 ? 0 : 1;
}

const char* kCsvHeader =
    "schema_version,stencil,nx,ny,nz,nt,dw,nf,tgs,variant,groups,seed,"
    "wall_seconds,glups,model_cs_bytes,model_bc,verified";

struct RunRecord {
    std::string stencil;
    int nx, ny, nz;
    long nt;
    int dw, nf;
    std::string tgs;
    std::string variant;
    int groups;
    std::uint64_t seed;
    double wall_seconds;
    double glups;
    long long model_cs_bytes;
    double model_bc;
    std::string verified = "na";
};

void write_record(std::ostream& os, const std::string& format, const RunRecord& r,
                  bool need_header) {
    if (format == "json") {
        json j{{"schema_version", kSchemaVersion},
               {"stencil", r.stencil},
               {"nx", r.nx},
               {"ny", r.ny},
               {"nz", r.nz},
               {"nt", r.nt},
               {"dw", r.dw},
               {"nf", r.nf},
               {"tgs", r.tgs},
               {"variant", r.variant},
               {"groups", r.groups},
               {"seed", r.seed},
               {"wall_seconds", r.wall_seconds},
               {"glups", r.glups},
               {"model_cs_bytes", r.model_cs_bytes},
               {"model_bc", r.model_bc},
               {"verified", r.verified}};
        os << j.dump() << '\n';  // one record per line; appending stays valid
    } else {
        if (need_header) os << kCsvHeader << '\n';
        os << kSchemaVersion << ',' << r.stencil << ',' << r.nx << ',' << r.ny << ',' << r.nz << ','
           << r.nt << ',' << r.dw << ',' << r.nf << ',' << r.tgs << ',' << r.variant << ','
           << r.groups << ',' << r.seed << ',' << r.wall_seconds << ',' << r.glups << ','
           << r.model_cs_bytes << ',' << r.model_bc << ',' << r.verified << '\n';
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return json::object();
    json j;
    in >> j;
    return j;
}

json tuned_key(const std::string& stencil, const GridSpec& g, const std::string& machine,
               int threads, const std::string& variant) {
    return json{{"stencil", stencil}, {"nx", g.nx},          {"ny", g.ny},
                {"nz", g.nz},         {"machine", machine},  {"threads", threads},
                {"variant", variant}};
}

const json* find_tuned(const json& doc, const json& key) {
    if (!doc.contains("results")) return nullptr;
    for (const auto& entry : doc["results"])
        if (entry.contains("key") && entry["key"] == key) return &entry;
    return nullptr;
}

int cmd_run(const Options& opt) {
    const StencilKind kind = stencil_from_name(opt.stencil);
    const GridSpec grid = grid_of(opt);
    int dw = opt.dw > 0 ? opt.dw : default_dw(kind);
    int nf = opt.nf;
    ThreadGroupShape shape = parse_tgs(opt.tgs);
    int groups = opt.groups;
    std::string variant_str = opt.variant;

    if (!opt.use_tuned.empty()) {
        const json doc = load_json_file(opt.use_tuned);
        const std::string machine_name = opt.machine.empty() ? "local" : opt.machine;
        const json key =
            tuned_key(opt.stencil, grid, machine_name, resolve_threads(opt), opt.variant);
        const json* entry = find_tuned(doc, key);
        if (!entry)
            throw std::runtime_error("no tuned configuration for this case in " + opt.use_tuned +
                                     "; run `girih tune` first");
        const json& best = (*entry)["best"];
        dw = best["dw"].get<int>();
        nf = best["nf"].get<int>();
        shape = parse_tgs(best["tgs"].get<std::string>());
        groups = best["groups"].get<int>();
        variant_str = best["variant"].get<std::string>();
    }

    const WavefrontVariant variant = variant_from_name(variant_str);
    const WavefrontSpec wf{nf, 0};
    const StencilTraits& tr = traits(kind);
    check_thread_budget(opt, shape, groups);

    // run twice, report the faster
    double wall = 0;
    for (int rep = 0; rep < 2; ++rep) {
        ProblemState state = init_state(kind, grid, opt.seed);
        const PerfReport r = run(state, opt.nt, dw, wf, shape, variant, groups);
        wall = rep == 0 ? r.wall_seconds : std::min(wall, r.wall_seconds);
    }

    RunRecord rec;
    rec.stencil = opt.stencil;
    rec.nx = grid.nx;
    rec.ny = grid.ny;
    rec.nz = grid.nz;
    rec.nt = opt.nt;
    rec.dw = dw;
    rec.nf = nf;
    rec.tgs = tgs_string(shape);
    rec.variant = variant_str;
    rec.groups = groups;
    rec.seed = opt.seed;
    rec.wall_seconds = wall;
    const long long lups = static_cast<long long>(grid.nx) * grid.ny * grid.nz * opt.nt;
    rec.glups = (wall > 0 && lups > 0) ? lups / wall / 1e9 : 0.0;
    rec.model_cs_bytes = cache_block_size(
        {grid.leading_dim_bytes(tr.radius), dw, nf, tr.radius, tr.domain_streams});
    rec.model_bc = code_balance(dw, tr.domain_streams, tr.radius);

    if (opt.out.empty()) {
        write_record(std::cout, opt.format, rec, true);
    } else {
        const bool fresh = !std::filesystem::exists(opt.out) ||
                           std::filesystem::file_size(opt.out) == 0;
        std::ofstream os(opt.out, std::ios::app);
        if (!os) throw std::runtime_error("cannot open output file: " + opt.out);
        write_record(os, opt.format, rec, fresh);
    }
    return 0;
}

bool model_identities_hold() {
    std::uint64_t rng = 12345;
    auto next = [&rng](int lo, int hi) {
        rng = rng * 6364136223846793005ull + 1442695040888963407ull;
        return lo + static_cast<int>((rng >> 33) % static_cast<std::uint64_t>(hi - lo + 1));
    };
    for (int it = 0; it < 100; ++it) {
        const int dw = 2 * next(1, 64);
        const int nf = next(1, 16);
        const int nd = next(1, 16);
        const long long n_xb = next(1, 4096);
        if (cache_block_size({n_xb, dw, nf, 1, nd}) != cache_block_size_first_order(n_xb, dw, nf, nd))
            return false;
        if (code_balance(dw, nd, 1) != code_balance_first_order(dw, nd)) return false;
    }
    return true;
}

int cmd_model(const Options& opt) {
    if (opt.table12) {
        std::cout << "machine,stencil,ecm_chain_cy,prediction_glups,saturation_cores\n";
        for (const ReferencePrediction& row : reference_predictions()) {
            const MachineSpec mach = MachineSpec::builtin(row.machine);
            const MulticorePrediction p = ecm_multicore(row.model, mach, mach.cores);
            const auto chain = ecm_chain(row.model);
            std::cout << row.machine << ',' << traits(row.kind).name << ",{" << chain[0] << " | "
                      << chain[1] << " | " << chain[2] << " | " << chain[3] << "},"
                      << report_round(p.glups) << ',' << p.saturation_cores << '\n';
        }
        return 0;
    }

    const StencilKind kind = stencil_from_name(opt.stencil);
    const StencilTraits& tr = traits(kind);
    const GridSpec grid = grid_of(opt);
    const int dw = opt.dw > 0 ? opt.dw : default_dw(kind);
    const auto machine = resolve_machine(opt);
    if (!machine) throw std::runtime_error("model: --machine or --machine-file required");

    const long long n_xb = grid.leading_dim_bytes(tr.radius);
    const long long cs = cache_block_size({n_xb, dw, opt.nf, tr.radius, tr.domain_streams});
    std::cout << "stencil: " << tr.name << "  dw: " << dw << "  nf: " << opt.nf
              << "  machine: " << machine->name << '\n';
    std::cout << "leading_dim_bytes: " << n_xb << '\n';
    std::cout << "cache_block_bytes: " << cs << "  (" << cs / n_xb << " * N_xb)\n";
    std::cout << "code_balance_bytes_per_lup: " << code_balance(dw, tr.domain_streams, tr.radius)
              << '\n';
    std::cout << "spatial_balance_bytes_per_lup: " << spatial_balance(kind) << '\n';
    std::cout << "roofline_spatial_glups: "
              << roofline(1.0 / spatial_balance(kind), machine->bandwidth_gbps) << '\n';

    for (const ReferencePrediction& row : reference_predictions()) {
        if (row.kind != kind || machine->name != row.machine) continue;
        const auto chain = ecm_chain(row.model);
        const MulticorePrediction p = ecm_multicore(row.model, *machine, machine->cores);
        std::cout << "ecm_chain_cy: {" << chain[0] << " | " << chain[1] << " | " << chain[2]
                  << " | " << chain[3] << "}\n";
        std::cout << "ecm_prediction_glups: " << report_round(p.glups) << '\n';
        std::cout << "saturation_cores: " << p.saturation_cores << '\n';
    }
    const bool consistent = model_identities_hold();
    std::cout << "model-consistency: " << (consistent ? "OK" : "MISMATCH") << '\n';
    return consistent ? 0 : 1;
}

int cmd_tune(const Options& opt) {
    const StencilKind kind = stencil_from_name(opt.stencil);
    const GridSpec grid = grid_of(opt);
    const int threads = resolve_threads(opt);
    const WavefrontVariant variant = variant_from_name(opt.variant);
    const auto machine = resolve_machine(opt);
    const std::string machine_name = machine ? machine->name : "local";
    const std::string out_path = opt.out.empty() ? "girih-tuned.json" : opt.out;

    if (opt.dry_run) {
        const StencilTraits& tr = traits(kind);
        MachineSpec budget_machine =
            machine ? *machine : MachineSpec{"local", 1, 1, threads, 0, 0};
        long long pruned = 0, kept = 0;
        for (TuningPoint p : enumerate_candidates(threads, variant)) {
            p.dw = opt.dw > 0 ? opt.dw : default_dw(kind);
            p.nf = opt.nf;
            const bool keep = prune_keep(p, grid.leading_dim_bytes(tr.radius), tr.domain_streams,
                                         tr.radius,
                                         static_cast<long long>(budget_machine.usable_cache_bytes));
            (keep ? kept : pruned)++;
            std::cout << (keep ? "candidate " : "pruned    ") << "tgs=" << tgs_string(p.shape)
                      << " groups=" << p.n_groups << '\n';
        }
        std::cout << "shapes: " << kept + pruned << "  kept: " << kept << "  pruned: " << pruned
                  << '\n';
        return 0;
    }

    const json key = tuned_key(opt.stencil, grid, machine_name, threads, opt.variant);
    json doc = load_json_file(out_path);
    if (!opt.force) {
        if (const json* entry = find_tuned(doc, key)) {
            std::cout << "tuned configuration already present (use --force to redo):\n"
                      << entry->dump(2) << '\n';
            return 0;
        }
    }

    TuneConfig cfg;
    cfg.cache_budget_bytes =
        machine ? static_cast<long long>(machine->usable_cache_bytes) : 0;
    MachineSpec mach = machine ? *machine : MachineSpec{"local", 1, 1, threads, 0, 0};
    const TuneResult result =
        tune(kind, grid, mach, threads, variant, cfg, make_engine_measure(kind, grid, opt.seed));

    json best{{"dw", result.best.dw},
              {"nf", result.best.nf},
              {"tgs", tgs_string(result.best.shape)},
              {"groups", result.best.n_groups},
              {"variant", variant_name(result.best.variant)},
              {"glups", result.best.measured_glups},
              {"test_rows", result.best.test_rows},
              {"low_confidence", result.best.low_confidence}};
    if (!doc.contains("results")) doc = json{{"schema_version", kSchemaVersion}, {"results", json::array()}};
    // replace any stale entry for the same key
    auto& results = doc["results"];
    for (auto it = results.begin(); it != results.end();)
        it = (it->contains("key") && (*it)["key"] == key) ? results.erase(it) : std::next(it);
    results.push_back(json{{"key", key},
                           {"best", best},
                           {"points_measured", result.log.size()},
                           {"shapes_tried", result.shapes_tried},
                           {"pruned", result.pruned}});

    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    os << doc.dump(2) << '\n';
    std::cout << "best: dw=" << result.best.dw << " nf=" << result.best.nf
              << " tgs=" << tgs_string(result.best.shape) << " groups=" << result.best.n_groups
              << " glups=" << result.best.measured_glups << " (" << result.log.size()
              << " points measured, " << result.pruned << " pruned)\n";
    std::cout << "written: " << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"girih: multi-core wavefront diamond stencil framework"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--stencil", opt.stencil, "const7pt|var7pt|const25pt|var25pt");
        sub->add_option("--nx", opt.nx, "interior cells in x");
        sub->add_option("--ny", opt.ny, "interior cells in y");
        sub->add_option("--nz", opt.nz, "interior cells in z");
        sub->add_option("--nt", opt.nt, "time steps");
        sub->add_option("--dw", opt.dw, "diamond width (default 8 or 16 by radius)");
        sub->add_option("--nf", opt.nf, "wavefront tile width");
        sub->add_option("--tgs", opt.tgs, "thread group shape TxXTyXTz, e.g. 2x1x2");
        sub->add_option("--variant", opt.variant, "relaxed|fed");
        sub->add_option("--groups", opt.groups, "concurrent thread groups");
        sub->add_option("--threads", opt.threads, "thread budget (fallback: GIRIH_THREADS)");
        sub->add_option("--seed", opt.seed, "deterministic initialization seed");
        sub->add_option("--machine", opt.machine, "builtin machine preset");
        sub->add_option("--machine-file", opt.machine_file, "key=value machine spec file");
        sub->add_option("--out", opt.out, "output file");
        sub->add_option("--format", opt.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* verify = app.add_subcommand("verify", "compare tiled engine against the naive oracle");
    add_common(verify);
    verify->add_flag("--all", opt.all, "sweep all stencils and the group-size-6 shapes");
    verify->add_flag("--inject-fault", opt.inject_fault,
                     "test hook: perturb one cell of the tiled result");

    CLI::App* runc = app.add_subcommand("run", "benchmark a configuration (run twice, keep faster)");
    add_common(runc);
    runc->add_option("--use-tuned", opt.use_tuned, "tuned-config JSON to take parameters from");

    CLI::App* model = app.add_subcommand("model", "analytic model report");
    add_common(model);
    model->add_flag("--table12", opt.table12, "print all builtin reference predictions");

    CLI::App* tunec = app.add_subcommand("tune", "auto-tune (dw, nf, tgs) for this host");
    add_common(tunec);
    tunec->add_flag("--force", opt.force, "redo tuning even when a result exists");
    tunec->add_flag("--dry-run", opt.dry_run, "list candidate shapes and pruning only");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(opt);
        if (runc->parsed()) return cmd_run(opt);
        if (model->parsed()) return cmd_model(opt);
        if (tunec->parsed()) return cmd_tune(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
