#include "plbm/cli.hpp"

#include "plbm/dump.hpp"
#include "plbm/fixtures.hpp"
#include "plbm/tile.hpp"
#include "plbm/topology.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

namespace plbm::iobench {

namespace {

double snapshot_pair_diff(const std::string& dir_a, const std::string& dir_b,
                          const std::string& base) {
    const std::vector<double> a = read_raw(dir_a + "/" + base + ".raw");
    const std::vector<double> b = read_raw(dir_b + "/" + base + ".raw");
    if (a.size() != b.size())
        throw std::runtime_error("compare: snapshot size mismatch at " +
                                 base);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void write_compare_csv(const ScenarioConfig& cfg,
                       const CompareResult& res, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    const std::uint64_t footprint = mesh::tile_footprint_bytes(
        cfg.tile_extent, cfg.three_d(),
        cfg.n_components(),
        cfg.three_d() ? 19 : 9);
    // Snapshot iterations -> max diff across fields/components.
    std::map<long, double> diff_at;
    for (const SnapshotDiff& d : res.diffs) {
        const std::size_t us = d.base.rfind("_i");
        const long iter = std::stol(d.base.substr(us + 2));
        auto [it, fresh] = diff_at.try_emplace(iter, d.max_abs_diff);
        if (!fresh) it->second = std::max(it->second, d.max_abs_diff);
    }
    out << "iteration";
    for (const char* side : {"static", "progressive"})
        out << ',' << side << "_tiles," << side << "_active_cells," << side
            << "_resident_bytes," << side << "_bytes_intra," << side
            << "_bytes_p2p," << side << "_bytes_staged," << side
            << "_window_mlups," << side << "_window_mlups_bbox";
    out << ",field_diff_max\n";
    const auto& sr = res.static_run.rows;
    const auto& pr = res.progressive_run.rows;
    const std::size_t n = std::min(sr.size(), pr.size());
    for (std::size_t i = 0; i < n; ++i) {
        out << sr[i].iteration;
        for (const ReportRow* r : {&sr[i], &pr[i]}) {
            out << ',' << r->tiles << ',' << r->active_cells << ','
                << r->tiles * footprint << ',' << r->bytes[0] << ','
                << r->bytes[1] << ',' << r->bytes[2];
            char buf[64];
            std::snprintf(buf, sizeof buf, ",%.6g,%.6g", r->window_mlups,
                          r->window_mlups_bbox);
            out << buf;
        }
        const auto it = diff_at.find(sr[i].iteration);
        if (it != diff_at.end()) {
            char buf[48];
            std::snprintf(buf, sizeof buf, ",%.17g", it->second);
            out << buf << '\n';
        } else {
            out << ",\n";
        }
    }
}

void write_compare_summary(const ScenarioConfig& cfg,
                           const CompareResult& res,
                           const std::string& path) {
    // Reuse the JSON writer through a tiny local document; the full
    // summaries are already in <out>/{static,progressive}/summary.json.
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    const auto& ss = res.static_run.summary;
    const auto& ps = res.progressive_run.summary;
    char buf[256];
    out << "{\n";
    out << "  \"scenario\": \"" << cfg.name << "\",\n";
    auto side = [&](const char* key, const RunSummary& s) {
        std::snprintf(buf, sizeof buf,
                      "  \"%s\": {\"status\": \"%s\", \"iterations\": %ld, "
                      "\"tiles_final\": %llu, \"peak_resident_bytes\": %llu, "
                      "\"mlups\": %.6g, \"mlups_bbox\": %.6g, "
                      "\"bytes_intra\": %llu, \"bytes_p2p\": %llu, "
                      "\"bytes_staged\": %llu},\n",
                      key, s.status.c_str(), s.iterations,
                      (unsigned long long)s.tiles_final,
                      (unsigned long long)s.peak_resident_bytes, s.mlups,
                      s.mlups_bbox, (unsigned long long)s.bytes[0],
                      (unsigned long long)s.bytes[1],
                      (unsigned long long)s.bytes[2]);
        out << buf;
    };
    side("static", ss);
    side("progressive", ps);
    const double ratio =
        ss.peak_resident_bytes
            ? double(ps.peak_resident_bytes) / double(ss.peak_resident_bytes)
            : 0.0;
    std::snprintf(buf, sizeof buf, "  \"peak_bytes_ratio\": %.6g,\n", ratio);
    out << buf;
    out << "  \"snapshot_diffs\": [";
    for (std::size_t i = 0; i < res.diffs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s{\"base\": \"%s\", \"max\": %.17g}",
                      i ? ", " : "", res.diffs[i].base.c_str(),
                      res.diffs[i].max_abs_diff);
        out << buf;
    }
    out << "],\n";
    std::snprintf(buf, sizeof buf, "  \"field_diff_max\": %.17g\n",
                  res.max_abs_diff);
    out << buf << "}\n";
}

} // namespace

CompareResult run_compare(const ScenarioConfig& cfg) {
    CompareResult res;
    res.output_dir = cfg.output_dir;

    ScenarioConfig sc = cfg;
    sc.mode = RunMode::Static;
    sc.output_dir = cfg.output_dir + "/static";
    ScenarioConfig pc = cfg;
    pc.mode = RunMode::Progressive;
    pc.output_dir = cfg.output_dir + "/progressive";

    res.static_run = engine::run_scenario(sc);
    res.progressive_run = engine::run_scenario(pc);

    for (const std::string& base : res.progressive_run.snapshot_bases) {
        const double d = snapshot_pair_diff(sc.output_dir, pc.output_dir,
                                            base);
        res.diffs.push_back({base, d});
        res.max_abs_diff = std::max(res.max_abs_diff, d);
    }
    write_compare_csv(cfg, res, cfg.output_dir + "/compare.csv");
    write_compare_summary(cfg, res,
                          cfg.output_dir + "/compare_summary.json");
    return res;
}

namespace {

int cmd_run(const std::string& config_path, const engine::RunOverrides& ov) {
    ScenarioConfig cfg = apply_overrides(load_config(config_path), ov);
    validate_config(cfg);
    const engine::RunResult res = engine::run_scenario(cfg);
    const RunSummary& s = res.summary;
    std::printf("%s: %s, %ld iterations, %llu tiles, %.3f MLUPS "
                "(%.3f bbox), peak %llu bytes\n",
                s.name.c_str(), s.status.c_str(), s.iterations,
                (unsigned long long)s.tiles_final, s.mlups, s.mlups_bbox,
                (unsigned long long)s.peak_resident_bytes);
    std::printf("outputs under %s\n", res.output_dir.c_str());
    return res.aborted ? 1 : 0;
}

int cmd_compare(const std::string& config_path) {
    const ScenarioConfig cfg = load_config(config_path);
    const CompareResult res = run_compare(cfg);
    const auto& ss = res.static_run.summary;
    const auto& ps = res.progressive_run.summary;
    std::printf("static:      %s, peak %llu bytes, %.3f MLUPS\n",
                ss.status.c_str(),
                (unsigned long long)ss.peak_resident_bytes, ss.mlups);
    std::printf("progressive: %s, peak %llu bytes, %.3f MLUPS\n",
                ps.status.c_str(),
                (unsigned long long)ps.peak_resident_bytes, ps.mlups);
    std::printf("max field diff over %zu snapshots: %.3g\n",
                res.diffs.size(), res.max_abs_diff);
    std::printf("outputs under %s\n", res.output_dir.c_str());
    return (res.static_run.aborted || res.progressive_run.aborted) ? 1 : 0;
}

int cmd_check_topology(const std::string& path) {
    const sched::DeviceTopology topo = sched::load_topology(path);
    sched::validate_topology(topo);
    std::printf("%d devices\n", topo.n_devices);
    const auto classes = sched::reachability_classes(topo);
    for (std::size_t k = 0; k < classes.size(); ++k) {
        std::printf("class %zu:", k);
        for (int d : classes[k]) std::printf(" %d", d);
        std::printf("\n");
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"tiled multiphase lattice Boltzmann benchmark"};
    app.require_subcommand(1);

    // --- run ---
    auto* run = app.add_subcommand("run", "run one scenario");
    std::string run_config;
    run->add_option("--config", run_config, "scenario TOML file")
        ->required();
    std::string mode_s, policy_s, topo_path, out_dir;
    int devices = 0, workers = 0;
    run->add_option("--mode", mode_s, "static|progressive")
        ->check(CLI::IsMember({"static", "progressive"}));
    run->add_option("--devices", devices, "simulated device count")
        ->check(CLI::PositiveNumber);
    run->add_option("--policy", policy_s, "simple|optimized")
        ->check(CLI::IsMember({"simple", "optimized"}));
    run->add_option("--topology", topo_path, "device topology file");
    run->add_option("--output", out_dir, "output directory");
    run->add_option("--workers", workers, "worker thread count")
        ->check(CLI::PositiveNumber);

    // --- compare ---
    auto* cmp = app.add_subcommand("compare",
                                   "run static and progressive, diff them");
    std::string cmp_config;
    cmp->add_option("--config", cmp_config, "scenario TOML file")
        ->required();

    // --- gen-geometry ---
    auto* gen = app.add_subcommand("gen-geometry",
                                   "write a built-in geometry fixture");
    std::string gtype, gout;
    int gnx = 0, gny = 0, gnz = 1;
    int leg_w = 0, leg_h = 0, psize = 4, ppitch = 16;
    gen->add_option("--type", gtype, "fixture kind")
        ->required()
        ->check(CLI::IsMember(
            {"open-box", "channel", "l-channel", "channel-grid"}));
    gen->add_option("--nx", gnx)->required()->check(CLI::PositiveNumber);
    gen->add_option("--ny", gny)->required()->check(CLI::PositiveNumber);
    gen->add_option("--nz", gnz)->check(CLI::PositiveNumber);
    gen->add_option("--leg-w", leg_w, "l-channel: vertical leg width");
    gen->add_option("--leg-h", leg_h, "l-channel: horizontal leg height");
    gen->add_option("--size", psize, "channel-grid: pillar size");
    gen->add_option("--pitch", ppitch, "channel-grid: pillar pitch");
    gen->add_option("--output", gout, "geometry file to write")->required();

    // --- check-topology ---
    auto* chk = app.add_subcommand("check-topology",
                                   "validate a topology file and print "
                                   "reachability classes");
    std::string chk_path;
    chk->add_option("path", chk_path, "topology file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (run->parsed()) {
            engine::RunOverrides ov;
            if (!mode_s.empty())
                ov.mode = mode_s == "static" ? RunMode::Static
                                             : RunMode::Progressive;
            if (devices > 0) ov.devices = devices;
            if (!policy_s.empty())
                ov.policy = policy_s == "simple"
                                ? sched::AssignPolicy::Simple
                                : sched::AssignPolicy::Optimized;
            if (!topo_path.empty()) ov.topology_path = topo_path;
            if (!out_dir.empty()) ov.output_dir = out_dir;
            if (workers > 0) ov.workers = workers;
            return cmd_run(run_config, ov);
        }
        if (cmp->parsed()) return cmd_compare(cmp_config);
        if (gen->parsed()) {
            GeometryMask m;
            if (gtype == "open-box") {
                m = gen_open_box(gnx, gny, gnz);
            } else if (gtype == "channel") {
                m = gen_channel(gnx, gny, gnz);
            } else if (gtype == "l-channel") {
                if (leg_w <= 0 || leg_h <= 0)
                    throw std::runtime_error(
                        "l-channel requires --leg-w and --leg-h");
                m = gen_l_channel(gnx, gny, leg_w, leg_h);
            } else {
                m = gen_channel_grid(gnx, gny, psize, ppitch);
            }
            save_geometry(m, gout);
            std::printf("%s: %dx%dx%d, %zu solid cells -> %s\n",
                        gtype.c_str(), m.nx, m.ny, m.nz, m.solid_count(),
                        gout.c_str());
            return 0;
        }
        if (chk->parsed()) return cmd_check_topology(chk_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2; // unreachable: a subcommand is required
}

} // namespace plbm::iobench
