#pragma once
// Tile: one fixed-size block of lattice cells, the unit of progressive
// mesh growth and of device assignment.
//
// Every per-cell buffer is allocated on the *extended* grid (interior
// plus a one-cell ghost ring) so stencil reads never branch:
//
//      gx = extent + 2, local x in [1, extent], ghosts at 0 and gx-1.
//
// 2-D tiles (D2Q9) have gz == 1 and no z ghosts. Distribution buffers
// are direction-major: f[i * gcells + cell]. rho/u/u_prev are only
// meaningful on interior cells; psi, f and the solid mask cover the
// ghost ring too.

#include "plbm/stencil.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace plbm::mesh {

struct TileCoord {
    int x = 0, y = 0, z = 0;
    friend auto operator<=>(const TileCoord&, const TileCoord&) = default;
};

enum Face : int { FaceMX = 0, FacePX, FaceMY, FacePY, FaceMZ, FacePZ };

inline constexpr const char* kFaceNames[6] = {"-x", "+x", "-y",
                                              "+y", "-z", "+z"};
inline constexpr int face_axis(Face f) { return int(f) / 2; }
inline constexpr int face_dir(Face f) { return (int(f) % 2) ? +1 : -1; }

// Per-component cell state. All vectors have gcells entries except the
// two distribution buffers (q * gcells each).
struct ComponentState {
    std::array<std::vector<double>, 2> f; // double-buffered populations
    std::vector<double> rho;
    std::vector<double> ux, uy, uz;       // current velocity
    std::vector<double> pux, puy, puz;    // previous-step velocity
    std::vector<double> psi;              // pseudo-potential (with halo)
};

struct Tile {
    TileCoord coords;
    int extent = 0;
    bool three_d = false;
    int gx = 0, gy = 0, gz = 0; // extended dims
    std::size_t gcells = 0;
    int cur = 0;                // index of the read buffer
    std::vector<ComponentState> comp;
    std::vector<std::uint8_t> solid; // extended; ghosts from global geometry
    int owner_device = -1;
    long birth_iteration = 0;
    std::size_t log_index = 0;  // row in the tile map's creation log

    // Fluid interior cells, split into the one-cell boundary layer and
    // the rest; the engine computes boundary cells first (P3 contract).
    std::vector<std::int32_t> boundary_cells;
    std::vector<std::int32_t> interior_cells;
    std::size_t fluid_count = 0;

    // Extended-grid linear index from local interior coords in
    // [-1, extent] x [-1, extent] x ([-1, extent] | {0}).
    std::size_t gidx(int lx, int ly, int lz) const {
        const int zoff = three_d ? lz + 1 : 0;
        return std::size_t(lx + 1) +
               std::size_t(gx) * (std::size_t(ly + 1) +
                                  std::size_t(gy) * std::size_t(zoff));
    }
    // Global cell coords of the tile's interior origin.
    int origin_x() const { return coords.x * extent; }
    int origin_y() const { return coords.y * extent; }
    int origin_z() const { return three_d ? coords.z * extent : 0; }

    double* f_read(int c) { return comp[c].f[cur].data(); }
    double* f_write(int c) { return comp[c].f[1 - cur].data(); }
    const double* f_read(int c) const { return comp[c].f[cur].data(); }
    void swap_buffers() { cur = 1 - cur; }
};

// Bytes resident for one tile: all doubles plus the solid mask.
// n_comp * (2q + 8) * 8 * gcells + gcells.
std::uint64_t tile_footprint_bytes(int extent, bool three_d, int n_comp,
                                   int q);
std::string tile_footprint_formula();

} // namespace plbm::mesh
