#pragma once
// TileMap: the progressive mesh. A sparse, ordered map from tile coords
// to tiles, the ambient frontier policy, the velocity-change activation
// criterion, and end-of-step expansion.

#include "plbm/geometry.hpp"
#include "plbm/physics.hpp"
#include "plbm/stencil.hpp"
#include "plbm/tile.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace plbm::mesh {

// Per-component ambient state used for fresh tiles and frontier ghosts;
// the ambient velocity is always zero.
struct AmbientState {
    std::vector<double> rho;                       // per component
    std::vector<double> psi;                       // derived, per component
    std::vector<std::array<double, 19>> feq;       // equilibrium at rest
};

struct CreationEvent {
    long iteration = 0;
    TileCoord coords;
    std::string trigger; // "init" or the face name of the first trigger
    int owner_device = -1;
};

// A face of an existing tile whose absent neighbor should be created.
struct ExpansionTrigger {
    TileCoord source;
    Face face;
};

class TileMap {
  public:
    // Geometry and domain data are fixed for the lifetime of the map.
    void init(const plbm::lattice::Stencil* stencil,
              const plbm::iobench::GeometryMask* geometry, int tile_extent,
              std::array<int, 3> domain_cells, std::array<bool, 3> periodic,
              int n_components, AmbientState ambient);

    Tile* at(TileCoord c);
    const Tile* at(TileCoord c) const;

    // Neighbor tile across `face`, wrapping on periodic axes. Returns
    // nullptr when absent; out-of-bounds sets *out_of_bounds.
    Tile* neighbor(const Tile& t, Face face, bool* out_of_bounds = nullptr);
    const Tile* neighbor(const Tile& t, Face face,
                         bool* out_of_bounds = nullptr) const;
    // Neighbor coords across `face`; false when out of bounds on a
    // non-periodic axis.
    bool neighbor_coords(TileCoord from, Face face, TileCoord& out) const;

    // Allocates a tile at ambient equilibrium, slices its solid mask
    // (ghost ring included) from the geometry, and appends a creation
    // log entry with owner -1. Duplicate coords are a hard error;
    // out-of-bounds coords count one suppressed expansion and return
    // nullptr.
    Tile* create_tile(TileCoord coords, long iteration,
                      const std::string& trigger);

    // Records the owner on both the tile and its creation log row.
    void set_owner(Tile& t, int device);

    // Faces of `t` adjacent to an absent neighbor where any component
    // changed velocity: max over the face's outermost fluid-cell layer
    // of |u - u_prev|_2 strictly greater than S. Out-of-bounds faces are
    // evaluated too; expand() suppresses them.
    std::vector<Face> evaluate_criterion(const Tile& t, double threshold_s);

    // Deduplicates triggers, suppresses out-of-bounds targets, creates
    // the remaining tiles, and returns them ordered by coords. Triggers
    // are resolved in (target, source, face) order so the logged trigger
    // face is deterministic.
    std::vector<Tile*> expand(std::vector<ExpansionTrigger> triggers,
                              long iteration);

    struct ActiveReport {
        std::uint64_t tiles = 0;
        std::uint64_t active_cells = 0; // interior fluid cells
        std::uint64_t bytes_resident = 0;
    };
    ActiveReport active_report() const;

    std::map<TileCoord, std::unique_ptr<Tile>>& tiles() { return tiles_; }
    const std::map<TileCoord, std::unique_ptr<Tile>>& tiles() const {
        return tiles_;
    }
    const std::vector<CreationEvent>& creation_log() const { return log_; }
    std::uint64_t suppressed_expansions() const { return suppressed_; }
    std::array<int, 3> tile_grid() const { return tile_grid_; }
    const AmbientState& ambient() const { return ambient_; }
    int n_components() const { return n_components_; }
    int tile_extent() const { return extent_; }
    bool three_d() const { return three_d_; }

  private:
    std::map<TileCoord, std::unique_ptr<Tile>> tiles_;
    std::vector<CreationEvent> log_;
    std::uint64_t suppressed_ = 0;
    std::uint64_t active_cells_ = 0;

    const plbm::lattice::Stencil* stencil_ = nullptr;
    const plbm::iobench::GeometryMask* geom_ = nullptr;
    int extent_ = 32;
    bool three_d_ = true;
    std::array<int, 3> domain_{};
    std::array<int, 3> tile_grid_{};
    std::array<bool, 3> periodic_{};
    int n_components_ = 1;
    AmbientState ambient_;
};

// Ambient state derived from component parameters: psi from the EOS at
// rho_ambient, populations at rest equilibrium.
AmbientState
make_ambient(const std::vector<plbm::physics::ComponentParams>& comps,
             const plbm::lattice::Stencil& s);

} // namespace plbm::mesh
