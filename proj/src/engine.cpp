#include "plbm/engine.hpp"

#include "plbm/dump.hpp"
#include "plbm/kernels.hpp"
#include "plbm/physics.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <stdexcept>
#include <thread>

namespace plbm::engine {

using plbm::iobench::BoundaryKind;
using plbm::iobench::RunMode;
using plbm::iobench::ScenarioConfig;
using plbm::lattice::Stencil;
using plbm::mesh::Face;
using plbm::mesh::Tile;
using plbm::mesh::TileCoord;

namespace {

void assign_owner(SimulationState& s, Tile& t) {
    std::vector<int> owners;
    const int n_faces = t.three_d ? 6 : 4;
    for (int fi = 0; fi < n_faces; ++fi) {
        const Tile* nb = s.map.neighbor(t, Face(fi));
        if (nb && nb->owner_device >= 0 && nb != &t)
            owners.push_back(nb->owner_device);
    }
    const int dev = sched::assign_device(owners, s.topo, s.assign,
                                         s.cfg.policy, s.face_xfer_bytes);
    s.map.set_owner(t, dev);
}

void apply_seeds(SimulationState& s) {
    const Stencil& st = s.st;
    for (const auto& seed : s.cfg.seeds) {
        double feq[plbm::lattice::kMaxQ];
        const double u[3] = {seed.velocity[0], seed.velocity[1],
                             seed.velocity[2]};
        plbm::lattice::equilibrium(seed.rho, u, st, feq);
        const auto c = std::size_t(seed.component);
        for (auto& [coords, tp] : s.map.tiles()) {
            Tile& t = *tp;
            mesh::ComponentState& cs = t.comp[c];
            const int e = t.extent;
            const int zhi = t.three_d ? e : 1;
            for (int lz = 0; lz < zhi; ++lz)
                for (int ly = 0; ly < e; ++ly)
                    for (int lx = 0; lx < e; ++lx) {
                        const std::size_t cell = t.gidx(lx, ly, lz);
                        if (t.solid[cell]) continue;
                        if (!seed.contains(t.origin_x() + lx + 0.5,
                                           t.origin_y() + ly + 0.5,
                                           t.origin_z() + lz + 0.5))
                            continue;
                        for (int i = 0; i < st.q; ++i) {
                            cs.f[0][std::size_t(i) * t.gcells + cell] = feq[i];
                            cs.f[1][std::size_t(i) * t.gcells + cell] = feq[i];
                        }
                        cs.rho[cell] = seed.rho;
                        cs.ux[cell] = u[0];
                        cs.uy[cell] = u[1];
                        cs.uz[cell] = u[2];
                    }
        }
    }
}

} // namespace

iobench::ScenarioConfig apply_overrides(iobench::ScenarioConfig cfg,
                                        const RunOverrides& ov) {
    if (ov.mode) cfg.mode = *ov.mode;
    if (ov.devices) cfg.devices = *ov.devices;
    if (ov.policy) cfg.policy = *ov.policy;
    if (ov.topology_path) cfg.topology_path = *ov.topology_path;
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    if (ov.workers) cfg.workers = *ov.workers;
    return cfg;
}

std::unique_ptr<SimulationState> make_state(const ScenarioConfig& cfg) {
    iobench::validate_config(cfg);
    auto sp = std::make_unique<SimulationState>();
    SimulationState& s = *sp;
    s.cfg = cfg;
    s.mode = cfg.mode;
    s.st = plbm::lattice::make_stencil(cfg.stencil);

    if (!cfg.geometry_path.empty()) {
        s.geom = iobench::load_geometry(cfg.geometry_path);
        if (s.geom.nx != cfg.domain[0] || s.geom.ny != cfg.domain[1] ||
            s.geom.nz != cfg.domain[2])
            throw std::runtime_error(
                "config: geometry dimensions do not match the domain");
    } else {
        s.geom = iobench::make_empty_geometry(cfg.domain[0], cfg.domain[1],
                                              cfg.domain[2]);
    }

    if (!cfg.topology_path.empty()) {
        s.topo = sched::load_topology(cfg.topology_path);
        if (cfg.devices != 1 && cfg.devices != s.topo.n_devices)
            throw std::runtime_error(
                "config: devices disagrees with the topology file (" +
                std::to_string(cfg.devices) + " vs " +
                std::to_string(s.topo.n_devices) + ")");
    } else {
        s.topo = sched::make_full_p2p(cfg.devices);
    }
    s.topo.weight_p2p = cfg.weight_p2p;
    s.topo.weight_staged = cfg.weight_staged;
    sched::validate_topology(s.topo);
    s.assign = sched::AssignmentState(s.topo.n_devices);

    s.map.init(&s.st, &s.geom, cfg.tile_extent, cfg.domain, cfg.periodic(),
               cfg.n_components(), mesh::make_ambient(cfg.components, s.st));

    const std::uint64_t face_area =
        std::uint64_t(cfg.tile_extent) *
        (cfg.three_d() ? std::uint64_t(cfg.tile_extent) : 1);
    s.face_xfer_bytes =
        sched::transfer_size(face_area, cfg.n_components(), s.st);

    // Initial tile set.
    std::set<TileCoord> initial;
    const auto grid = s.map.tile_grid();
    if (cfg.mode == RunMode::Static) {
        for (int tx = 0; tx < grid[0]; ++tx)
            for (int ty = 0; ty < grid[1]; ++ty)
                for (int tz = 0; tz < grid[2]; ++tz)
                    initial.insert({tx, ty, tz});
    } else {
        if (cfg.seeds.empty())
            throw std::runtime_error(
                "config: progressive mode requires at least one seed region");
        const int e = cfg.tile_extent;
        for (const auto& seed : cfg.seeds)
            for (int z = 0; z < cfg.domain[2]; ++z)
                for (int y = 0; y < cfg.domain[1]; ++y)
                    for (int x = 0; x < cfg.domain[0]; ++x)
                        if (seed.contains(x + 0.5, y + 0.5, z + 0.5))
                            initial.insert(
                                {x / e, y / e, cfg.three_d() ? z / e : 0});
    }
    for (const TileCoord& c : initial) {
        Tile* t = s.map.create_tile(c, 0, "init");
        assign_owner(s, *t);
    }
    apply_seeds(s);
    return sp;
}

// ---------------------------------------------------------------------
// Worker pool + the five phases.

struct Engine::Impl {
    SimulationState& s;
    const int W;
    std::barrier<> gate;
    std::function<void(int)> job;
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::vector<Tile*>> mine;     // per-worker tile lists
    std::vector<std::vector<mesh::ExpansionTrigger>> triggers; // per worker
    std::vector<std::jthread> threads;

    Impl(SimulationState& state, int workers)
        : s(state), W(workers), gate(W + 1) {
        threads.reserve(std::size_t(W));
        for (int w = 0; w < W; ++w)
            threads.emplace_back([this, w] { worker_loop(w); });
    }
    ~Impl() {
        stop.store(true);
        gate.arrive_and_wait();
    }

    void worker_loop(int w) {
        for (;;) {
            gate.arrive_and_wait();
            if (stop.load()) return;
            try {
                job(w);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
            gate.arrive_and_wait();
        }
    }

    void parallel(std::function<void(int)> f) {
        job = std::move(f);
        gate.arrive_and_wait(); // release workers
        gate.arrive_and_wait(); // wait for completion
        if (error) {
            std::exception_ptr e = error;
            error = nullptr;
            std::rethrow_exception(e);
        }
    }

    void partition() {
        mine.assign(std::size_t(W), {});
        for (auto& [c, tp] : s.map.tiles())
            mine[std::size_t(tp->owner_device % W)].push_back(tp.get());
    }

    // ---- P1: rho, pressure, psi; u_prev snapshot -----------------
    void phase1(int w) {
        const Stencil& st = s.st;
        const long it = s.iteration + 1; // the step being computed
        for (Tile* tp : mine[std::size_t(w)]) {
            Tile& t = *tp;
            std::uint64_t neg = 0, clamps = 0;
            for (int c = 0; c < s.map.n_components(); ++c) {
                const auto& par = s.cfg.components[std::size_t(c)];
                mesh::ComponentState& cs = t.comp[std::size_t(c)];
                std::copy(cs.ux.begin(), cs.ux.end(), cs.pux.begin());
                std::copy(cs.uy.begin(), cs.uy.end(), cs.puy.begin());
                std::copy(cs.uz.begin(), cs.uz.end(), cs.puz.begin());
                const double* f = t.f_read(c);
                auto scan = [&](const std::vector<std::int32_t>& cells) {
                    for (std::int32_t cell : cells) {
                        double rho = 0.0;
                        for (int i = 0; i < st.q; ++i) {
                            const double v =
                                f[std::size_t(i) * t.gcells + cell];
                            rho += v;
                            if (v < 0.0) ++neg;
                        }
                        if (!std::isfinite(rho))
                            throw EngineError(it, t.coords, "P1",
                                              "NaN in density");
                        double press;
                        try {
                            press = plbm::physics::pr_pressure(rho, par);
                        } catch (const std::exception& ex) {
                            throw EngineError(it, t.coords, "P1", ex.what());
                        }
                        cs.rho[std::size_t(cell)] = rho;
                        cs.psi[std::size_t(cell)] =
                            plbm::physics::pseudo_potential(
                                rho, press, par.g_self, st.cs2, &clamps);
                    }
                };
                scan(t.boundary_cells);
                scan(t.interior_cells);
            }
            if (neg) s.diag.negative_populations.fetch_add(neg);
            if (clamps) s.diag.psi_clamps.fetch_add(clamps);
        }
    }

    // ---- ghost-fill passes (P2: psi, P4: populations) -------------
    // One pass per axis in x, y, z order. Axes before `axis` copy the
    // extended range (their ghost columns are already filled, which is
    // what routes edge/corner values); axes after it copy the interior.
    struct Slab {
        int lo[3], hi[3]; // destination ranges on the extended grid
        int src_shift;    // add to the axis coordinate to get the source
    };
    Slab make_slab(const Tile& t, int axis, int dir) const {
        Slab sl{};
        const int g[3] = {t.gx, t.gy, t.gz};
        for (int b = 0; b < 3; ++b) {
            if (b == axis) {
                const int ghost = dir < 0 ? 0 : g[b] - 1;
                sl.lo[b] = ghost;
                sl.hi[b] = ghost + 1;
            } else if (g[b] == 1) { // flat z in 2-D
                sl.lo[b] = 0;
                sl.hi[b] = 1;
            } else if (b < axis) {
                sl.lo[b] = 0;
                sl.hi[b] = g[b];
            } else {
                sl.lo[b] = 1;
                sl.hi[b] = g[b] - 1;
            }
        }
        // Source cell in the neighbor: its interior layer next to me.
        sl.src_shift = dir < 0 ? g[axis] - 2 : -(g[axis] - 2);
        return sl;
    }

    template <class CopyLayer, class FillLayer>
    void ghost_pass(int w, int axis, CopyLayer&& copy, FillLayer&& fill) {
        for (Tile* tp : mine[std::size_t(w)]) {
            Tile& t = *tp;
            for (int dir = -1; dir <= 1; dir += 2) {
                const Face face = Face(2 * axis + (dir < 0 ? 0 : 1));
                Tile* nb = s.map.neighbor(t, face);
                const Slab sl = make_slab(t, axis, dir);
                if (nb) {
                    copy(t, *nb, sl, axis);
                    sched::record_exchange(t.owner_device, nb->owner_device,
                                           s.topo, s.face_xfer_bytes);
                } else {
                    fill(t, sl);
                }
            }
        }
    }

    void pass_psi(int w, int axis) {
        ghost_pass(
            w, axis,
            [&](Tile& t, Tile& nb, const Slab& sl, int ax) {
                const long stride[3] = {1, t.gx, long(t.gx) * t.gy};
                const long src_off = sl.src_shift * stride[ax];
                for (int c = 0; c < s.map.n_components(); ++c) {
                    double* dst = t.comp[std::size_t(c)].psi.data();
                    const double* src = nb.comp[std::size_t(c)].psi.data();
                    for (int z = sl.lo[2]; z < sl.hi[2]; ++z)
                        for (int y = sl.lo[1]; y < sl.hi[1]; ++y)
                            for (int x = sl.lo[0]; x < sl.hi[0]; ++x) {
                                const long cell =
                                    x + stride[1] * y + stride[2] * z;
                                dst[cell] = src[cell + src_off];
                            }
                }
            },
            [&](Tile& t, const Slab& sl) {
                const long stride[3] = {1, t.gx, long(t.gx) * t.gy};
                for (int c = 0; c < s.map.n_components(); ++c) {
                    const double amb = s.map.ambient().psi[std::size_t(c)];
                    double* dst = t.comp[std::size_t(c)].psi.data();
                    for (int z = sl.lo[2]; z < sl.hi[2]; ++z)
                        for (int y = sl.lo[1]; y < sl.hi[1]; ++y)
                            for (int x = sl.lo[0]; x < sl.hi[0]; ++x) {
                                const long cell =
                                    x + stride[1] * y + stride[2] * z;
                                // Solid ghosts keep psi = 0, exactly as
                                // an existing neighbor would report.
                                dst[cell] =
                                    t.solid[std::size_t(cell)] ? 0.0 : amb;
                            }
                }
            });
    }

    void pass_populations(int w, int axis) {
        ghost_pass(
            w, axis,
            [&](Tile& t, Tile& nb, const Slab& sl, int ax) {
                const long stride[3] = {1, t.gx, long(t.gx) * t.gy};
                const long src_off = sl.src_shift * stride[ax];
                for (int c = 0; c < s.map.n_components(); ++c) {
                    double* dst = t.f_read(c);
                    const double* src = nb.f_read(c);
                    for (int i = 0; i < s.st.q; ++i) {
                        const std::size_t plane = std::size_t(i) * t.gcells;
                        for (int z = sl.lo[2]; z < sl.hi[2]; ++z)
                            for (int y = sl.lo[1]; y < sl.hi[1]; ++y)
                                for (int x = sl.lo[0]; x < sl.hi[0]; ++x) {
                                    const long cell =
                                        x + stride[1] * y + stride[2] * z;
                                    dst[plane + cell] =
                                        src[plane + cell + src_off];
                                }
                    }
                }
            },
            [&](Tile& t, const Slab& sl) {
                const long stride[3] = {1, t.gx, long(t.gx) * t.gy};
                for (int c = 0; c < s.map.n_components(); ++c) {
                    const auto& feq = s.map.ambient().feq[std::size_t(c)];
                    double* dst = t.f_read(c);
                    for (int i = 0; i < s.st.q; ++i) {
                        const std::size_t plane = std::size_t(i) * t.gcells;
                        for (int z = sl.lo[2]; z < sl.hi[2]; ++z)
                            for (int y = sl.lo[1]; y < sl.hi[1]; ++y)
                                for (int x = sl.lo[0]; x < sl.hi[0]; ++x)
                                    dst[plane + x + stride[1] * y +
                                        stride[2] * z] = feq[std::size_t(i)];
                    }
                }
            });
    }

    // ---- P3: forces, forcing delta, in-place collision -------------
    void phase3(int w) {
        const long it = s.iteration + 1;
        for (Tile* tp : mine[std::size_t(w)]) {
            Tile& t = *tp;
            collide_cells(t, t.boundary_cells);
            if (s.trace)
                s.trace->emit(it, t.coords, TraceEvent::Kind::BoundaryDone);
            collide_cells(t, t.interior_cells);
            if (s.trace)
                s.trace->emit(it, t.coords, TraceEvent::Kind::InteriorDone);
        }
    }

    void collide_cells(Tile& t, const std::vector<std::int32_t>& cells) {
        const Stencil& st = s.st;
        const long stride[3] = {1, t.gx, long(t.gx) * t.gy};
        const int n_comp = s.map.n_components();
        std::uint64_t zero_rho = 0;
        for (int c = 0; c < n_comp; ++c) {
            const auto& par = s.cfg.components[std::size_t(c)];
            mesh::ComponentState& cs = t.comp[std::size_t(c)];
            double* f = t.f_read(c);
            const bool has_gravity = par.gravity[0] != 0.0 ||
                                     par.gravity[1] != 0.0 ||
                                     par.gravity[2] != 0.0;
            const double omega = 1.0 / par.tau;
            for (std::int32_t cell : cells) {
                const double rho = cs.rho[std::size_t(cell)];
                const double u[3] = {cs.ux[std::size_t(cell)],
                                     cs.uy[std::size_t(cell)],
                                     cs.uz[std::size_t(cell)]};
                // Total force: gravity + self-interaction + couplings.
                double F[3] = {0, 0, 0};
                if (has_gravity) {
                    F[0] = rho * par.gravity[0];
                    F[1] = rho * par.gravity[1];
                    F[2] = rho * par.gravity[2];
                }
                const auto Fi = plbm::physics::intra_force(
                    cs.psi.data(), cell, stride, par, st);
                F[0] += Fi[0];
                F[1] += Fi[1];
                F[2] += Fi[2];
                for (int c2 = 0; c2 < n_comp; ++c2) {
                    if (c2 == c) continue;
                    const double g = s.cfg.coupling.at(c, c2);
                    if (g == 0.0) continue;
                    const auto Fx = plbm::physics::inter_force(
                        cs.psi[std::size_t(cell)],
                        t.comp[std::size_t(c2)].psi.data(), cell, stride, g,
                        st);
                    F[0] += Fx[0];
                    F[1] += Fx[1];
                    F[2] += Fx[2];
                }

                double eq0[plbm::lattice::kMaxQ];
                plbm::lattice::equilibrium(rho, u, st, eq0);
                if (F[0] == 0.0 && F[1] == 0.0 && F[2] == 0.0) {
                    for (int i = 0; i < st.q; ++i) {
                        const std::size_t k =
                            std::size_t(i) * t.gcells + std::size_t(cell);
                        f[k] += omega * (eq0[i] - f[k]);
                    }
                } else if (rho <= 0.0) {
                    ++zero_rho; // force dropped; collision still relaxes
                    for (int i = 0; i < st.q; ++i) {
                        const std::size_t k =
                            std::size_t(i) * t.gcells + std::size_t(cell);
                        f[k] += omega * (eq0[i] - f[k]);
                    }
                } else {
                    const double us[3] = {u[0] + F[0] / rho, u[1] + F[1] / rho,
                                          u[2] + F[2] / rho};
                    double eq1[plbm::lattice::kMaxQ];
                    plbm::lattice::equilibrium(rho, us, st, eq1);
                    for (int i = 0; i < st.q; ++i) {
                        const std::size_t k =
                            std::size_t(i) * t.gcells + std::size_t(cell);
                        f[k] += omega * (eq0[i] - f[k]) + eq1[i] - eq0[i];
                    }
                }
            }
        }
        if (zero_rho) s.diag.zero_rho_forcings.fetch_add(zero_rho);
    }

    // ---- P4 streaming, ---- P5 moments + criterion ------------------
    void phase4_stream(int w) {
        for (Tile* tp : mine[std::size_t(w)]) {
            Tile& t = *tp;
            for (int c = 0; c < s.map.n_components(); ++c)
                plbm::lattice::stream_pull(s.st, t.f_read(c), t.f_write(c),
                                           t.solid.data(), t.gx, t.gy, t.gz);
            t.swap_buffers();
        }
    }

    void phase5(int w) {
        const Stencil& st = s.st;
        const long it = s.iteration + 1;
        const bool progressive = s.mode == RunMode::Progressive;
        for (Tile* tp : mine[std::size_t(w)]) {
            Tile& t = *tp;
            for (int c = 0; c < s.map.n_components(); ++c) {
                mesh::ComponentState& cs = t.comp[std::size_t(c)];
                const double* f = t.f_read(c);
                auto scan = [&](const std::vector<std::int32_t>& cells) {
                    for (std::int32_t cell : cells) {
                        double fi[plbm::lattice::kMaxQ];
                        for (int i = 0; i < st.q; ++i)
                            fi[i] = f[std::size_t(i) * t.gcells +
                                      std::size_t(cell)];
                        double rho, u[3];
                        plbm::lattice::moments(fi, st, rho, u);
                        if (!std::isfinite(rho) || !std::isfinite(u[0]) ||
                            !std::isfinite(u[1]) || !std::isfinite(u[2]))
                            throw EngineError(it, t.coords, "P5",
                                              "NaN in moments");
                        cs.rho[std::size_t(cell)] = rho;
                        cs.ux[std::size_t(cell)] = u[0];
                        cs.uy[std::size_t(cell)] = u[1];
                        cs.uz[std::size_t(cell)] = u[2];
                    }
                };
                scan(t.boundary_cells);
                scan(t.interior_cells);
            }
            if (progressive)
                for (Face face :
                     s.map.evaluate_criterion(t, s.cfg.threshold))
                    triggers[std::size_t(w)].push_back({t.coords, face});
        }
    }
};

Engine::Engine(SimulationState& state, int n_workers)
    : st_(state),
      n_workers_(n_workers > 0 ? n_workers : state.topo.n_devices),
      impl_(std::make_unique<Impl>(state, n_workers_)) {}

Engine::~Engine() = default;

void Engine::step() {
    Impl& im = *impl_;
    SimulationState& s = st_;
    im.partition();
    const std::uint64_t updates = s.map.active_report().active_cells;

    im.parallel([&](int w) { im.phase1(w); });
    const int axes = s.cfg.three_d() ? 3 : 2;
    for (int a = 0; a < axes; ++a)
        im.parallel([&, a](int w) { im.pass_psi(w, a); });
    im.parallel([&](int w) { im.phase3(w); });
    for (int a = 0; a < axes; ++a)
        im.parallel([&, a](int w) { im.pass_populations(w, a); });
    im.parallel([&](int w) { im.phase4_stream(w); });
    im.triggers.assign(std::size_t(im.W), {});
    im.parallel([&](int w) { im.phase5(w); });

    if (s.mode == RunMode::Progressive) {
        std::vector<mesh::ExpansionTrigger> merged;
        for (auto& v : im.triggers)
            merged.insert(merged.end(), v.begin(), v.end());
        for (Tile* t : s.map.expand(std::move(merged), s.iteration + 1))
            assign_owner(s, *t);
    }
    ++s.iteration;
    s.cell_updates += updates;
}

// ---------------------------------------------------------------------
// Full-run orchestration with reports and snapshots.

namespace {

std::string snapshot_base(const std::string& field, int comp,
                          long iteration) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s_c%d_i%07ld", field.c_str(), comp,
                  iteration);
    return buf;
}

} // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    namespace fs = std::filesystem;
    auto sp = make_state(cfg);
    SimulationState& s = *sp;
    Engine eng(s, cfg.workers);

    RunResult res;
    res.output_dir = cfg.output_dir;
    fs::create_directories(cfg.output_dir);
    const bool snapshots = cfg.snapshot_interval > 0;
    if (snapshots) fs::create_directories(cfg.output_dir + "/snapshots");

    auto take_snapshot = [&](long iter) {
        for (const std::string& field : cfg.snapshot_fields)
            for (int c = 0; c < cfg.n_components(); ++c) {
                const std::string base = snapshot_base(field, c, iter);
                iobench::dump_field(s.map, cfg.domain, field, c, iter,
                                    cfg.output_dir + "/snapshots/" + base,
                                    cfg.snapshot_pgm);
                res.snapshot_bases.push_back("snapshots/" + base);
            }
    };
    if (snapshots) take_snapshot(0);

    const std::uint64_t bbox_cells = std::uint64_t(cfg.domain[0]) *
                                     cfg.domain[1] * cfg.domain[2];
    std::uint64_t peak_bytes = s.map.active_report().bytes_resident;
    double total_seconds = 0.0;
    double win_seconds = 0.0;
    std::uint64_t win_updates = 0, win_steps = 0;
    std::uint64_t last_neg = 0, last_clamp = 0, last_suppressed = 0;

    auto flush_row = [&](long iter) {
        const auto rep = s.map.active_report();
        const auto bytes = s.topo.byte_totals();
        iobench::ReportRow row;
        row.iteration = iter;
        row.tiles = rep.tiles;
        row.active_cells = rep.active_cells;
        row.bytes = bytes;
        row.window_seconds = win_seconds;
        row.window_mlups = iobench::mlups(win_updates, win_seconds);
        row.window_mlups_bbox =
            iobench::mlups(win_steps * bbox_cells, win_seconds);
        const std::uint64_t neg = s.diag.negative_populations.load();
        const std::uint64_t clamp = s.diag.psi_clamps.load();
        const std::uint64_t sup = s.map.suppressed_expansions();
        row.window_negative_populations = neg - last_neg;
        row.window_psi_clamps = clamp - last_clamp;
        row.window_suppressed_expansions = sup - last_suppressed;
        last_neg = neg;
        last_clamp = clamp;
        last_suppressed = sup;
        res.rows.push_back(row);
        win_seconds = 0.0;
        win_updates = 0;
        win_steps = 0;
    };

    for (long k = 1; k <= cfg.iterations; ++k) {
        const std::uint64_t before = s.cell_updates;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            eng.step();
        } catch (const EngineError& e) {
            res.aborted = true;
            res.abort_context = e.what();
            break;
        }
        const auto t1 = std::chrono::steady_clock::now();
        const double dt = std::chrono::duration<double>(t1 - t0).count();
        total_seconds += dt;
        win_seconds += dt;
        win_updates += s.cell_updates - before;
        ++win_steps;
        peak_bytes =
            std::max(peak_bytes, s.map.active_report().bytes_resident);
        if (k % cfg.report_interval == 0 || k == cfg.iterations)
            flush_row(k);
        if (snapshots &&
            (k % cfg.snapshot_interval == 0 || k == cfg.iterations))
            take_snapshot(k);
    }
    if (res.aborted && win_steps > 0) flush_row(s.iteration);

    // Summary.
    iobench::RunSummary& sum = res.summary;
    sum.name = cfg.name;
    sum.mode = cfg.mode == RunMode::Static ? "static" : "progressive";
    sum.policy =
        cfg.policy == sched::AssignPolicy::Simple ? "simple" : "optimized";
    sum.stencil =
        cfg.stencil == plbm::lattice::StencilKind::D2Q9 ? "D2Q9" : "D3Q19";
    sum.devices = s.topo.n_devices;
    sum.workers = eng.n_workers();
    sum.tile_extent = cfg.tile_extent;
    sum.domain = cfg.domain;
    sum.iterations = s.iteration;
    sum.total_cell_updates = s.cell_updates;
    sum.compute_seconds = total_seconds;
    sum.mlups = iobench::mlups(s.cell_updates, total_seconds);
    sum.mlups_bbox =
        iobench::mlups(std::uint64_t(s.iteration) * bbox_cells,
                       total_seconds);
    sum.peak_resident_bytes = peak_bytes;
    sum.footprint_formula = mesh::tile_footprint_formula();
    const auto rep = s.map.active_report();
    sum.tiles_final = rep.tiles;
    sum.active_cells_final = rep.active_cells;
    sum.bytes = s.topo.byte_totals();
    sum.negative_populations = s.diag.negative_populations.load();
    sum.psi_clamps = s.diag.psi_clamps.load();
    sum.suppressed_expansions = s.map.suppressed_expansions();
    sum.zero_rho_forcings = s.diag.zero_rho_forcings.load();
    sum.per_device_tiles = s.assign.tiles_per_device;
    sum.status =
        res.aborted ? "aborted: " + res.abort_context : "completed";

    iobench::write_time_series_csv(res.rows,
                                   cfg.output_dir + "/time_series.csv");
    iobench::write_creation_log_csv(s.map.creation_log(),
                                    cfg.output_dir + "/creation_log.csv");
    iobench::write_summary_json(sum, cfg.output_dir + "/summary.json");
    return res;
}

} // namespace plbm::engine
