#pragma once
// Per-iteration orchestration. Each step runs five barrier-separated
// phases over worker-owned tiles:
//
//   P1  per tile: rho, pressure, psi; snapshot u into u_prev
//   P2  exchange psi halos (one ordered pass per axis)
//   P3  per tile: forces -> forcing delta -> BGK collide, in place,
//       boundary cell layer before interior cells
//   P4  exchange population halos (ordered passes), stream + bounce-back
//       into the write buffer, swap
//   P5  per tile: moments; progressive mode: expansion criterion, then
//       single-coordinator expand + assign
//
// Ghost fills run one axis at a time (x, then y, then z); later passes
// copy the neighbor's already-filled earlier-axis ghost columns, which
// routes edge/corner values through face neighbors.

#include "plbm/assign.hpp"
#include "plbm/report.hpp"
#include "plbm/scenario.hpp"
#include "plbm/tilemap.hpp"
#include "plbm/topology.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace plbm::engine {

struct Diagnostics {
    std::atomic<std::uint64_t> negative_populations{0};
    std::atomic<std::uint64_t> psi_clamps{0};
    std::atomic<std::uint64_t> zero_rho_forcings{0};
};

// Ordering contract probe: P3 emits one BoundaryDone and one
// InteriorDone event per tile per step when a sink is attached.
struct TraceEvent {
    enum class Kind { BoundaryDone, InteriorDone };
    long iteration;
    mesh::TileCoord tile;
    Kind kind;
    std::uint64_t seq;
};

struct TraceSink {
    std::mutex mutex;
    std::vector<TraceEvent> events;
    std::atomic<std::uint64_t> next_seq{0};

    void emit(long iteration, mesh::TileCoord tile, TraceEvent::Kind kind) {
        const std::uint64_t s =
            next_seq.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard lock(mutex);
        events.push_back({iteration, tile, kind, s});
    }
};

// NaN (or EOS-pole) abort with full context.
struct EngineError : std::runtime_error {
    long iteration;
    mesh::TileCoord tile;
    std::string phase;
    EngineError(long it, mesh::TileCoord t, std::string ph, std::string what)
        : std::runtime_error("iteration " + std::to_string(it) + ", tile (" +
                             std::to_string(t.x) + "," + std::to_string(t.y) +
                             "," + std::to_string(t.z) + "), phase " + ph +
                             ": " + what),
          iteration(it), tile(t), phase(std::move(ph)) {}
};

struct SimulationState {
    iobench::ScenarioConfig cfg;
    iobench::RunMode mode;
    plbm::lattice::Stencil st;
    iobench::GeometryMask geom;
    sched::DeviceTopology topo;
    sched::AssignmentState assign;
    mesh::TileMap map;
    long iteration = 0;
    std::uint64_t cell_updates = 0;
    Diagnostics diag;
    TraceSink* trace = nullptr;
    std::uint64_t face_xfer_bytes = 0; // transfer_size of one tile face

    SimulationState() : assign(1) {}
};

// Builds the full state: stencil, geometry, topology, ambient, initial
// tiles (all tiles in static mode; seed-intersecting tiles in
// progressive mode) with seeds applied and owners assigned.
std::unique_ptr<SimulationState> make_state(const iobench::ScenarioConfig&);

class Engine {
  public:
    // n_workers <= 0 means one worker per device.
    Engine(SimulationState& state, int n_workers);
    ~Engine();

    // One P1..P5 iteration. Throws EngineError on NaN or EOS-pole hits;
    // the state's iteration counter and cell-update accumulator advance
    // only on success.
    void step();

    int n_workers() const { return n_workers_; }

  private:
    struct Impl;
    SimulationState& st_;
    int n_workers_;
    std::unique_ptr<Impl> impl_;
};

// Overridable bits of a config (mirrors the CLI flags).
struct RunOverrides {
    std::optional<iobench::RunMode> mode;
    std::optional<int> devices;
    std::optional<sched::AssignPolicy> policy;
    std::optional<std::string> topology_path;
    std::optional<std::string> output_dir;
    std::optional<int> workers;
};

iobench::ScenarioConfig apply_overrides(iobench::ScenarioConfig cfg,
                                        const RunOverrides& ov);

struct RunResult {
    std::vector<iobench::ReportRow> rows;
    iobench::RunSummary summary;
    std::string output_dir;
    std::vector<std::string> snapshot_bases; // per snapshot, sans suffix
    bool aborted = false;
    std::string abort_context;
};

// Runs a full scenario: N iterations with time-series rows, snapshots,
// creation log, and summary.json written under cfg.output_dir. On an
// engine abort the partial report is still written and `aborted` set.
RunResult run_scenario(const iobench::ScenarioConfig& cfg);

} // namespace plbm::engine
