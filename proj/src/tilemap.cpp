#include "plbm/tilemap.hpp"

#include "plbm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plbm::mesh {

using plbm::lattice::Stencil;

AmbientState
make_ambient(const std::vector<plbm::physics::ComponentParams>& comps,
             const Stencil& s) {
    AmbientState a;
    for (const auto& c : comps) {
        a.rho.push_back(c.rho_ambient);
        const double press = plbm::physics::pr_pressure(c.rho_ambient, c);
        a.psi.push_back(plbm::physics::pseudo_potential(
            c.rho_ambient, press, c.g_self, s.cs2));
        std::array<double, 19> feq{};
        const double u0[3] = {0, 0, 0};
        plbm::lattice::equilibrium(c.rho_ambient, u0, s, feq.data());
        a.feq.push_back(feq);
    }
    return a;
}

void TileMap::init(const Stencil* stencil,
                   const plbm::iobench::GeometryMask* geometry,
                   int tile_extent, std::array<int, 3> domain_cells,
                   std::array<bool, 3> periodic, int n_components,
                   AmbientState ambient) {
    stencil_ = stencil;
    geom_ = geometry;
    extent_ = tile_extent;
    three_d_ = stencil->dim == 3;
    domain_ = domain_cells;
    periodic_ = periodic;
    n_components_ = n_components;
    ambient_ = std::move(ambient);
    tile_grid_ = {domain_[0] / extent_, domain_[1] / extent_,
                  three_d_ ? domain_[2] / extent_ : 1};
}

Tile* TileMap::at(TileCoord c) {
    auto it = tiles_.find(c);
    return it == tiles_.end() ? nullptr : it->second.get();
}
const Tile* TileMap::at(TileCoord c) const {
    auto it = tiles_.find(c);
    return it == tiles_.end() ? nullptr : it->second.get();
}

bool TileMap::neighbor_coords(TileCoord from, Face face,
                              TileCoord& out) const {
    int c[3] = {from.x, from.y, from.z};
    const int axis = face_axis(face);
    c[axis] += face_dir(face);
    if (c[axis] < 0 || c[axis] >= tile_grid_[axis]) {
        if (!periodic_[axis]) return false;
        c[axis] = (c[axis] + tile_grid_[axis]) % tile_grid_[axis];
    }
    out = {c[0], c[1], c[2]};
    return true;
}

Tile* TileMap::neighbor(const Tile& t, Face face, bool* out_of_bounds) {
    TileCoord nc;
    const bool ok = neighbor_coords(t.coords, face, nc);
    if (out_of_bounds) *out_of_bounds = !ok;
    return ok ? at(nc) : nullptr;
}
const Tile* TileMap::neighbor(const Tile& t, Face face,
                              bool* out_of_bounds) const {
    TileCoord nc;
    const bool ok = neighbor_coords(t.coords, face, nc);
    if (out_of_bounds) *out_of_bounds = !ok;
    return ok ? at(nc) : nullptr;
}

Tile* TileMap::create_tile(TileCoord coords, long iteration,
                           const std::string& trigger) {
    if (coords.x < 0 || coords.x >= tile_grid_[0] || coords.y < 0 ||
        coords.y >= tile_grid_[1] || coords.z < 0 ||
        coords.z >= tile_grid_[2]) {
        ++suppressed_;
        return nullptr;
    }
    if (at(coords))
        throw std::logic_error("create_tile: duplicate tile coords");

    auto tp = std::make_unique<Tile>();
    Tile& t = *tp;
    t.coords = coords;
    t.extent = extent_;
    t.three_d = three_d_;
    t.gx = extent_ + 2;
    t.gy = extent_ + 2;
    t.gz = three_d_ ? extent_ + 2 : 1;
    t.gcells = std::size_t(t.gx) * t.gy * t.gz;
    t.birth_iteration = iteration;

    // Solid mask, ghost ring included, from the global geometry.
    // Out-of-domain ghosts are fluid on ambient axes and wrap on
    // periodic ones.
    t.solid.assign(t.gcells, 0);
    const int zlo = three_d_ ? -1 : 0;
    const int zhi = three_d_ ? extent_ + 1 : 1;
    for (int lz = zlo; lz < zhi; ++lz)
        for (int ly = -1; ly <= extent_; ++ly)
            for (int lx = -1; lx <= extent_; ++lx) {
                int g[3] = {t.origin_x() + lx, t.origin_y() + ly,
                            t.origin_z() + lz};
                bool outside = false;
                for (int ax = 0; ax < 3; ++ax) {
                    if (g[ax] < 0 || g[ax] >= domain_[ax]) {
                        if (periodic_[ax])
                            g[ax] = (g[ax] + domain_[ax]) % domain_[ax];
                        else
                            outside = true;
                    }
                }
                if (!outside && geom_->at(g[0], g[1], g[2]))
                    t.solid[t.gidx(lx, ly, lz)] = 1;
            }

    // Ambient equilibrium everywhere (both buffers, ghosts included);
    // the solid entries are never read.
    const int q = stencil_->q;
    t.comp.resize(std::size_t(n_components_));
    for (int c = 0; c < n_components_; ++c) {
        ComponentState& cs = t.comp[std::size_t(c)];
        for (auto& buf : cs.f) {
            buf.resize(std::size_t(q) * t.gcells);
            for (int i = 0; i < q; ++i)
                std::fill_n(buf.begin() + std::ptrdiff_t(i * t.gcells),
                            t.gcells, ambient_.feq[std::size_t(c)][i]);
        }
        cs.rho.assign(t.gcells, 0.0);
        cs.ux.assign(t.gcells, 0.0);
        cs.uy.assign(t.gcells, 0.0);
        cs.uz.assign(t.gcells, 0.0);
        cs.pux.assign(t.gcells, 0.0);
        cs.puy.assign(t.gcells, 0.0);
        cs.puz.assign(t.gcells, 0.0);
        cs.psi.assign(t.gcells, 0.0);
        for (std::size_t cell = 0; cell < t.gcells; ++cell)
            if (!t.solid[cell]) cs.rho[cell] = ambient_.rho[std::size_t(c)];
    }

    // Fluid interior cells, boundary layer first.
    const int e = extent_;
    const int izhi = three_d_ ? e : 1;
    for (int lz = 0; lz < izhi; ++lz)
        for (int ly = 0; ly < e; ++ly)
            for (int lx = 0; lx < e; ++lx) {
                const std::size_t cell = t.gidx(lx, ly, lz);
                if (t.solid[cell]) continue;
                const bool boundary =
                    lx == 0 || lx == e - 1 || ly == 0 || ly == e - 1 ||
                    (three_d_ && (lz == 0 || lz == e - 1));
                (boundary ? t.boundary_cells : t.interior_cells)
                    .push_back(std::int32_t(cell));
                ++t.fluid_count;
            }

    active_cells_ += t.fluid_count;
    t.log_index = log_.size();
    log_.push_back({iteration, coords, trigger, -1});
    Tile* raw = tp.get();
    tiles_.emplace(coords, std::move(tp));
    return raw;
}

void TileMap::set_owner(Tile& t, int device) {
    t.owner_device = device;
    log_[t.log_index].owner_device = device;
}

std::vector<Face> TileMap::evaluate_criterion(const Tile& t,
                                              double threshold_s) {
    std::vector<Face> out;
    const double s2 = threshold_s * threshold_s;
    const int e = t.extent;
    const int n_faces = t.three_d ? 6 : 4;
    for (int fi = 0; fi < n_faces; ++fi) {
        const Face face = Face(fi);
        if (neighbor(t, face) != nullptr) continue; // nothing to create
        // Outermost fluid-cell layer on this face.
        const int axis = face_axis(face);
        const int fixed = face_dir(face) < 0 ? 0 : e - 1;
        int lo[3] = {0, 0, 0};
        int hi[3] = {e, e, t.three_d ? e : 1};
        lo[axis] = fixed;
        hi[axis] = fixed + 1;
        bool fired = false;
        for (int c = 0; c < n_components_ && !fired; ++c) {
            const ComponentState& cs = t.comp[std::size_t(c)];
            for (int lz = lo[2]; lz < hi[2] && !fired; ++lz)
                for (int ly = lo[1]; ly < hi[1] && !fired; ++ly)
                    for (int lx = lo[0]; lx < hi[0]; ++lx) {
                        const std::size_t cell = t.gidx(lx, ly, lz);
                        if (t.solid[cell]) continue;
                        const double dx = cs.ux[cell] - cs.pux[cell];
                        const double dy = cs.uy[cell] - cs.puy[cell];
                        const double dz = cs.uz[cell] - cs.puz[cell];
                        if (dx * dx + dy * dy + dz * dz > s2) {
                            fired = true;
                            break;
                        }
                    }
        }
        if (fired) out.push_back(face);
    }
    return out;
}

std::vector<Tile*> TileMap::expand(std::vector<ExpansionTrigger> triggers,
                                   long iteration) {
    // Resolve every target once; (target, source, face) order makes the
    // logged trigger face deterministic.
    struct Resolved {
        TileCoord target;
        TileCoord source;
        Face face;
        bool in_bounds;
    };
    std::vector<Resolved> rs;
    rs.reserve(triggers.size());
    for (const auto& tr : triggers) {
        TileCoord target;
        const bool ok = neighbor_coords(tr.source, tr.face, target);
        if (!ok) {
            // Out-of-bounds neighbor: keep for suppression accounting.
            rs.push_back({TileCoord{}, tr.source, tr.face, false});
        } else {
            rs.push_back({target, tr.source, tr.face, true});
        }
    }
    std::sort(rs.begin(), rs.end(), [](const Resolved& a, const Resolved& b) {
        if (a.in_bounds != b.in_bounds) return a.in_bounds > b.in_bounds;
        if (a.target != b.target) return a.target < b.target;
        if (a.source != b.source) return a.source < b.source;
        return int(a.face) < int(b.face);
    });

    std::vector<Tile*> created;
    const TileCoord* last_target = nullptr;
    for (const auto& r : rs) {
        if (!r.in_bounds) {
            ++suppressed_;
            continue;
        }
        if (last_target && r.target == *last_target) continue; // dedup
        last_target = &r.target;
        if (at(r.target)) continue; // raced by a periodic alias
        created.push_back(
            create_tile(r.target, iteration, kFaceNames[int(r.face)]));
    }
    std::sort(created.begin(), created.end(), [](Tile* a, Tile* b) {
        return a->coords < b->coords;
    });
    return created;
}

TileMap::ActiveReport TileMap::active_report() const {
    ActiveReport r;
    r.tiles = tiles_.size();
    r.active_cells = active_cells_;
    r.bytes_resident =
        r.tiles * tile_footprint_bytes(extent_, three_d_, n_components_,
                                       stencil_ ? stencil_->q : 0);
    return r;
}

} // namespace plbm::mesh
