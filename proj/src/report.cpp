#include "plbm/report.hpp"

#include "json.hpp" // vendored nlohmann::json single header

#include <fstream>
#include <stdexcept>

namespace plbm::iobench {

double mlups(std::uint64_t cell_updates, double seconds) {
    if (seconds <= 0.0) return 0.0;
    return double(cell_updates) / seconds / 1e6;
}

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("report: cannot write '" + path + "'");
    return out;
}
} // namespace

void write_time_series_csv(const std::vector<ReportRow>& rows,
                           const std::string& path) {
    auto out = open_out(path);
    out << "iteration,tiles,active_cells,bytes_intra,bytes_p2p,bytes_staged,"
           "window_seconds,window_mlups,window_mlups_bbox,"
           "window_negative_populations,window_psi_clamps,"
           "window_suppressed_expansions\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.iteration << ',' << r.tiles << ',' << r.active_cells << ','
            << r.bytes[0] << ',' << r.bytes[1] << ',' << r.bytes[2] << ','
            << r.window_seconds << ',' << r.window_mlups << ','
            << r.window_mlups_bbox << ',' << r.window_negative_populations
            << ',' << r.window_psi_clamps << ','
            << r.window_suppressed_expansions << '\n';
}

void write_creation_log_csv(const std::vector<mesh::CreationEvent>& log,
                            const std::string& path) {
    auto out = open_out(path);
    out << "iteration,tile_x,tile_y,tile_z,trigger_face,owner_device\n";
    for (const auto& e : log)
        out << e.iteration << ',' << e.coords.x << ',' << e.coords.y << ','
            << e.coords.z << ',' << e.trigger << ',' << e.owner_device
            << '\n';
}

void write_summary_json(const RunSummary& s, const std::string& path) {
    nlohmann::json j;
    j["name"] = s.name;
    j["mode"] = s.mode;
    j["policy"] = s.policy;
    j["stencil"] = s.stencil;
    j["devices"] = s.devices;
    j["workers"] = s.workers;
    j["tile_extent"] = s.tile_extent;
    j["domain"] = s.domain;
    j["iterations"] = s.iterations;
    j["total_cell_updates"] = s.total_cell_updates;
    j["compute_seconds"] = s.compute_seconds;
    j["mlups"] = s.mlups;
    j["mlups_bbox"] = s.mlups_bbox;
    j["peak_resident_bytes"] = s.peak_resident_bytes;
    j["footprint_formula"] = s.footprint_formula;
    j["tiles_final"] = s.tiles_final;
    j["active_cells_final"] = s.active_cells_final;
    j["bytes"] = {{"intra", s.bytes[0]},
                  {"p2p", s.bytes[1]},
                  {"staged", s.bytes[2]}};
    j["diagnostics"] = {{"negative_populations", s.negative_populations},
                        {"psi_clamps", s.psi_clamps},
                        {"suppressed_expansions", s.suppressed_expansions},
                        {"zero_rho_forcings", s.zero_rho_forcings}};
    j["per_device_tiles"] = s.per_device_tiles;
    j["status"] = s.status;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace plbm::iobench
