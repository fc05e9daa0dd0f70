#pragma once
// Scenario configuration: everything a run needs, parsed from a TOML
// file with strict validation (unknown keys rejected).

#include "plbm/assign.hpp"
#include "plbm/physics.hpp"
#include "plbm/stencil.hpp"

#include <array>
#include <string>
#include <vector>

namespace plbm::iobench {

enum class RunMode { Static, Progressive };
enum class BoundaryKind { Ambient, Periodic };

struct SeedRegion {
    enum class Shape { Box, Sphere };
    Shape shape = Shape::Box;
    int component = 0;
    std::array<double, 3> box_min{0, 0, 0}; // box: [min, max) in cells
    std::array<double, 3> box_max{0, 0, 0};
    std::array<double, 3> center{0, 0, 0};  // sphere
    double radius = 0.0;
    double rho = 1.0;
    std::array<double, 3> velocity{0, 0, 0};

    bool contains(double x, double y, double z) const;
};

struct ScenarioConfig {
    std::string name = "scenario";
    plbm::lattice::StencilKind stencil =
        plbm::lattice::StencilKind::D2Q9;
    std::array<int, 3> domain{0, 0, 1};
    int tile_extent = 32;
    RunMode mode = RunMode::Progressive;
    long iterations = 0;
    long report_interval = 10;
    long snapshot_interval = 0; // 0 = no snapshots
    double threshold = 0.0;     // S in the expansion criterion
    int devices = 1;
    plbm::sched::AssignPolicy policy = plbm::sched::AssignPolicy::Optimized;
    std::string topology_path; // empty = full P2P over `devices`
    double weight_p2p = 0.5;
    double weight_staged = 1.0;
    std::string geometry_path; // empty = no solids
    std::string output_dir = "out";
    std::array<BoundaryKind, 3> boundary{BoundaryKind::Ambient,
                                         BoundaryKind::Ambient,
                                         BoundaryKind::Ambient};
    std::vector<std::string> snapshot_fields{"rho"};
    bool snapshot_pgm = false;
    int workers = 0; // 0 = one per device
    std::vector<plbm::physics::ComponentParams> components;
    plbm::physics::CouplingMatrix coupling;
    std::vector<SeedRegion> seeds;

    int n_components() const { return int(components.size()); }
    bool three_d() const {
        return stencil == plbm::lattice::StencilKind::D3Q19;
    }
    std::array<bool, 3> periodic() const {
        return {boundary[0] == BoundaryKind::Periodic,
                boundary[1] == BoundaryKind::Periodic,
                boundary[2] == BoundaryKind::Periodic};
    }
};

// Parses and validates. Relative geometry/topology paths are resolved
// against the config file's directory. Throws std::runtime_error with
// a per-field message on any violation; unknown keys are errors.
ScenarioConfig load_config(const std::string& path);

// Validation applied by load_config, reusable for hand-built configs.
void validate_config(const ScenarioConfig& cfg);

} // namespace plbm::iobench
