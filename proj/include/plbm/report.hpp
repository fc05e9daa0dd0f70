#pragma once
// Run reporting: CSV time series, creation-log CSV, JSON summary.

#include "plbm/tilemap.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace plbm::iobench {

// One time-series row. Byte counters are cumulative; the window_*
// columns cover the steps since the previous row. window_seconds,
// window_mlups and window_mlups_bbox are the wall-clock-dependent
// columns; everything else is deterministic for a fixed config.
struct ReportRow {
    long iteration = 0;
    std::uint64_t tiles = 0;
    std::uint64_t active_cells = 0;
    std::array<std::uint64_t, 3> bytes{}; // intra, p2p, staged
    double window_seconds = 0.0;
    double window_mlups = 0.0;
    double window_mlups_bbox = 0.0;
    std::uint64_t window_negative_populations = 0;
    std::uint64_t window_psi_clamps = 0;
    std::uint64_t window_suppressed_expansions = 0;
};

struct RunSummary {
    std::string name, mode, policy, stencil;
    int devices = 0, workers = 0, tile_extent = 0;
    std::array<int, 3> domain{};
    long iterations = 0;
    std::uint64_t total_cell_updates = 0;
    double compute_seconds = 0.0;
    double mlups = 0.0;       // active-cell updates / seconds / 1e6
    double mlups_bbox = 0.0;  // full-domain-size variant
    std::uint64_t peak_resident_bytes = 0;
    std::string footprint_formula;
    std::uint64_t tiles_final = 0;
    std::uint64_t active_cells_final = 0;
    std::array<std::uint64_t, 3> bytes{};
    std::uint64_t negative_populations = 0;
    std::uint64_t psi_clamps = 0;
    std::uint64_t suppressed_expansions = 0;
    std::uint64_t zero_rho_forcings = 0;
    std::vector<std::uint64_t> per_device_tiles;
    std::string status = "completed"; // or "aborted: <context>"
};

// cell_updates / seconds / 1e6; 0 when seconds <= 0.
double mlups(std::uint64_t cell_updates, double seconds);

void write_time_series_csv(const std::vector<ReportRow>& rows,
                           const std::string& path);
void write_creation_log_csv(const std::vector<mesh::CreationEvent>& log,
                            const std::string& path);
void write_summary_json(const RunSummary& s, const std::string& path);

} // namespace plbm::iobench
