#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "plbm/engine.hpp"
#include "plbm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

using namespace plbm::engine;
using plbm::iobench::BoundaryKind;
using plbm::iobench::ScenarioConfig;
using plbm::iobench::SeedRegion;
using plbm::lattice::StencilKind;
using plbm::mesh::Tile;
using plbm::mesh::TileCoord;

namespace {

ScenarioConfig base_cfg(int nx, int ny, int extent) {
    ScenarioConfig cfg;
    cfg.name = "unit";
    cfg.stencil = StencilKind::D2Q9;
    cfg.domain = {nx, ny, 1};
    cfg.tile_extent = extent;
    cfg.mode = plbm::iobench::RunMode::Static;
    cfg.iterations = 1;
    cfg.report_interval = 1000000;
    cfg.components.resize(1); // ideal gas: tau 1, rho 1, psi = 0
    cfg.coupling.n = 1;
    cfg.coupling.g = {0.0};
    return cfg;
}

SeedRegion box_seed(double x0, double y0, double x1, double y1, double rho,
                    std::array<double, 3> u) {
    SeedRegion s;
    s.shape = SeedRegion::Shape::Box;
    s.box_min = {x0, y0, 0};
    s.box_max = {x1, y1, 1};
    s.rho = rho;
    s.velocity = u;
    return s;
}

double interior_mass(const SimulationState& s, int c = 0) {
    double m = 0.0;
    for (const auto& [coords, tp] : s.map.tiles()) {
        const Tile& t = *tp;
        const double* f = t.f_read(c);
        auto add = [&](const std::vector<std::int32_t>& cells) {
            for (const std::int32_t cell : cells)
                for (int i = 0; i < s.st.q; ++i)
                    m += f[std::size_t(i) * t.gcells + std::size_t(cell)];
        };
        add(t.boundary_cells);
        add(t.interior_cells);
    }
    return m;
}

} // namespace

TEST_CASE("quiescent ambient state is a fixed point up to roundoff") {
    ScenarioConfig cfg = base_cfg(32, 16, 16);
    auto s = make_state(cfg);
    Engine eng(*s, 1);
    const double m0 = interior_mass(*s);
    for (int k = 0; k < 20; ++k) eng.step();
    CHECK(std::abs(interior_mass(*s) - m0) / m0 < 1e-12);
    for (const auto& [coords, tp] : s->map.tiles())
        for (const std::int32_t cell : tp->interior_cells) {
            for (int i = 0; i < s->st.q; ++i)
                CHECK(std::abs(tp->f_read(0)[std::size_t(i) * tp->gcells +
                                             std::size_t(cell)] -
                               s->st.w[i]) < 1e-12);
            CHECK(std::abs(tp->comp[0].rho[std::size_t(cell)] - 1.0) < 1e-12);
            CHECK(std::abs(tp->comp[0].ux[std::size_t(cell)]) < 1e-13);
        }
    CHECK(s->iteration == 20);
    CHECK(s->cell_updates == 20u * 32 * 16);
}

TEST_CASE("fully periodic single tile conserves mass every step") {
    ScenarioConfig cfg = base_cfg(16, 16, 16);
    cfg.boundary = {BoundaryKind::Periodic, BoundaryKind::Periodic,
                    BoundaryKind::Ambient};
    cfg.seeds.push_back(box_seed(4, 4, 8, 8, 1.1, {0.03, -0.01, 0}));
    auto s = make_state(cfg);
    Engine eng(*s, 1);
    const double m0 = interior_mass(*s);
    CHECK(m0 > 16.0 * 16.0); // the seed added mass
    for (int k = 0; k < 10; ++k) {
        eng.step();
        CHECK(std::abs(interior_mass(*s) - m0) / m0 < 1e-12);
    }
}

TEST_CASE("u_prev holds exactly the previous iteration's velocity") {
    ScenarioConfig cfg = base_cfg(16, 16, 16);
    cfg.boundary = {BoundaryKind::Periodic, BoundaryKind::Periodic,
                    BoundaryKind::Ambient};
    cfg.seeds.push_back(box_seed(2, 2, 9, 9, 1.05, {0.02, 0.01, 0}));
    auto s = make_state(cfg);
    Tile& t = *s->map.tiles().begin()->second;
    const std::vector<double> ux0 = t.comp[0].ux, uy0 = t.comp[0].uy;
    Engine eng(*s, 1);
    eng.step();
    bool changed = false;
    for (const std::int32_t cell : t.interior_cells) {
        CHECK(t.comp[0].pux[std::size_t(cell)] == ux0[std::size_t(cell)]);
        CHECK(t.comp[0].puy[std::size_t(cell)] == uy0[std::size_t(cell)]);
        if (t.comp[0].ux[std::size_t(cell)] != ux0[std::size_t(cell)])
            changed = true;
    }
    CHECK(changed); // the flow actually evolved
}

TEST_CASE("P3 computes every tile's boundary layer before its interior") {
    ScenarioConfig cfg = base_cfg(32, 32, 16); // 2 x 2 tiles
    cfg.seeds.push_back(box_seed(8, 8, 24, 24, 1.2, {0.01, 0.0, 0}));
    auto s = make_state(cfg);
    TraceSink sink;
    s->trace = &sink;
    Engine eng(*s, 2);
    for (int k = 0; k < 3; ++k) eng.step();

    std::map<std::pair<long, std::array<int, 3>>,
             std::pair<std::uint64_t, std::uint64_t>>
        seq; // (iteration, tile) -> (boundary seq, interior seq)
    int boundary_events = 0, interior_events = 0;
    for (const TraceEvent& ev : sink.events) {
        const std::array<int, 3> tc{ev.tile.x, ev.tile.y, ev.tile.z};
        auto& slot = seq[{ev.iteration, tc}];
        if (ev.kind == TraceEvent::Kind::BoundaryDone) {
            slot.first = ev.seq + 1; // +1 distinguishes "set" from zero
            ++boundary_events;
        } else {
            slot.second = ev.seq + 1;
            ++interior_events;
        }
    }
    CHECK(boundary_events == 3 * 4);
    CHECK(interior_events == 3 * 4);
    for (const auto& [key, pair] : seq) {
        REQUIRE(pair.first != 0);
        REQUIRE(pair.second != 0);
        CHECK(pair.first < pair.second);
    }
}

TEST_CASE("results do not depend on the worker count") {
    ScenarioConfig cfg = base_cfg(32, 32, 16);
    cfg.devices = 4;
    cfg.seeds.push_back(box_seed(4, 4, 28, 28, 1.15, {0.02, -0.01, 0}));

    auto a = make_state(cfg);
    auto b = make_state(cfg);
    Engine ea(*a, 1), eb(*b, 4);
    CHECK(ea.n_workers() == 1);
    CHECK(eb.n_workers() == 4);
    for (int k = 0; k < 5; ++k) {
        ea.step();
        eb.step();
    }
    REQUIRE(a->map.tiles().size() == b->map.tiles().size());
    auto ib = b->map.tiles().begin();
    for (auto ia = a->map.tiles().begin(); ia != a->map.tiles().end();
         ++ia, ++ib) {
        const Tile &ta = *ia->second, &tb = *ib->second;
        REQUIRE(ta.coords == tb.coords);
        CHECK(ta.owner_device == tb.owner_device);
        // Bit-identical state: same arithmetic in the same order per tile.
        CHECK(std::equal(ta.comp[0].f[ta.cur].begin(),
                         ta.comp[0].f[ta.cur].end(),
                         tb.comp[0].f[tb.cur].begin()));
        CHECK(std::equal(ta.comp[0].rho.begin(), ta.comp[0].rho.end(),
                         tb.comp[0].rho.begin()));
        CHECK(std::equal(ta.comp[0].ux.begin(), ta.comp[0].ux.end(),
                         tb.comp[0].ux.begin()));
    }
    CHECK(a->topo.byte_totals() == b->topo.byte_totals());
}

TEST_CASE("progressive expansion: growth, suppression, ambient newborns") {
    ScenarioConfig cfg = base_cfg(32, 16, 16); // 2 x 1 tiles
    cfg.mode = plbm::iobench::RunMode::Progressive;
    cfg.threshold = 1e-9;
    cfg.seeds.push_back(box_seed(0, 0, 16, 16, 1.0, {0.05, 0, 0}));
    auto s = make_state(cfg);
    REQUIRE(s->map.tiles().size() == 1); // only the seeded tile
    CHECK(s->map.tiles().begin()->first == TileCoord{0, 0, 0});

    Engine eng(*s, 1);
    eng.step();

    // The +x face fired and created tile (1,0,0); -x/-y/+y were out of
    // bounds and got suppressed.
    REQUIRE(s->map.tiles().size() == 2);
    CHECK(s->map.suppressed_expansions() == 3);
    const Tile& fresh = *s->map.tiles().rbegin()->second;
    CHECK(fresh.coords == TileCoord{1, 0, 0});
    CHECK(fresh.birth_iteration == 1);
    CHECK(fresh.owner_device == 0);
    REQUIRE(s->map.creation_log().size() == 2);
    CHECK(s->map.creation_log()[1].trigger == "+x");
    CHECK(s->map.creation_log()[1].iteration == 1);

    // Newborn tiles hold exactly the ambient state.
    double m = 0.0;
    for (const std::int32_t cell : fresh.boundary_cells)
        for (int i = 0; i < s->st.q; ++i)
            m += fresh.f_read(0)[std::size_t(i) * fresh.gcells +
                                 std::size_t(cell)];
    for (const std::int32_t cell : fresh.interior_cells)
        for (int i = 0; i < s->st.q; ++i)
            m += fresh.f_read(0)[std::size_t(i) * fresh.gcells +
                                 std::size_t(cell)];
    double amb_cell = 0.0;
    for (int i = 0; i < s->st.q; ++i)
        amb_cell += s->map.ambient().feq[0][std::size_t(i)];
    CHECK(m == doctest::Approx(256.0 * amb_cell).epsilon(1e-14));

    // Step updates count pre-expansion active cells.
    CHECK(s->cell_updates == 256);
    eng.step();
    CHECK(s->cell_updates == 256 + 512);
}

TEST_CASE("a large threshold freezes the mesh") {
    ScenarioConfig cfg = base_cfg(32, 16, 16);
    cfg.mode = plbm::iobench::RunMode::Progressive;
    cfg.threshold = 10.0;
    cfg.seeds.push_back(box_seed(0, 0, 16, 16, 1.0, {0.05, 0, 0}));
    auto s = make_state(cfg);
    Engine eng(*s, 1);
    for (int k = 0; k < 5; ++k) eng.step();
    CHECK(s->map.tiles().size() == 1);
    CHECK(s->map.suppressed_expansions() == 0);
}

TEST_CASE("static init assigns tiles fairly across devices") {
    ScenarioConfig cfg = base_cfg(64, 16, 16); // 4 x 1 tiles
    cfg.devices = 2;
    auto s = make_state(cfg);
    CHECK(s->assign.tiles_per_device.size() == 2);
    CHECK(s->assign.tiles_per_device[0] == 2);
    CHECK(s->assign.tiles_per_device[1] == 2);
    CHECK(s->assign.total == 4);
    for (const auto& [coords, tp] : s->map.tiles())
        CHECK(tp->owner_device >= 0);
}

TEST_CASE("exchange byte totals match the closed form") {
    // Two adjacent tiles, one device: psi + population passes each record
    // one face exchange per tile per step -> 4 * face_xfer_bytes per step.
    ScenarioConfig cfg = base_cfg(32, 16, 16);
    auto s = make_state(cfg);
    const std::uint64_t ts = s->face_xfer_bytes;
    CHECK(ts == 16u * 1 * (3 + 1) * 8);
    Engine eng(*s, 1);
    for (int k = 0; k < 3; ++k) eng.step();
    auto tot = s->topo.byte_totals();
    CHECK(tot[0] == 3u * 4 * ts); // intra
    CHECK(tot[1] == 0);
    CHECK(tot[2] == 0);

    // Same layout on two mutually reachable devices: all P2P.
    ScenarioConfig cfg2 = base_cfg(32, 16, 16);
    cfg2.devices = 2;
    auto s2 = make_state(cfg2);
    Engine eng2(*s2, 1);
    for (int k = 0; k < 3; ++k) eng2.step();
    auto tot2 = s2->topo.byte_totals();
    CHECK(tot2[0] == 0);
    CHECK(tot2[1] == 3u * 4 * ts);
    CHECK(tot2[2] == 0);
}

TEST_CASE("NaN poisoning aborts with full context and no state advance") {
    ScenarioConfig cfg = base_cfg(16, 16, 16);
    auto s = make_state(cfg);
    Tile& t = *s->map.tiles().begin()->second;
    t.comp[0].f[t.cur][t.gidx(5, 5, 0)] =
        std::numeric_limits<double>::quiet_NaN();
    Engine eng(*s, 2);
    CHECK_THROWS_AS(eng.step(), EngineError);
    // Rebuild and poison again to inspect the context fields.
    auto s2 = make_state(cfg);
    Tile& t2 = *s2->map.tiles().begin()->second;
    t2.comp[0].f[t2.cur][t2.gidx(5, 5, 0)] =
        std::numeric_limits<double>::quiet_NaN();
    Engine eng2(*s2, 1);
    try {
        eng2.step();
        FAIL("expected EngineError");
    } catch (const EngineError& e) {
        CHECK(e.iteration == 1);
        CHECK(e.phase == "P1");
        CHECK(std::string(e.what()).find("tile (0,0,0)") !=
              std::string::npos);
        CHECK(std::string(e.what()).find("NaN") != std::string::npos);
    }
    CHECK(s2->iteration == 0);
    CHECK(s2->cell_updates == 0);
}

TEST_CASE("make_state validates cross-field constraints") {
    ScenarioConfig cfg = base_cfg(32, 16, 16);
    cfg.mode = plbm::iobench::RunMode::Progressive;
    CHECK_THROWS_WITH_AS(
        (void)make_state(cfg),
        "config: progressive mode requires at least one seed region",
        std::runtime_error);

    // Geometry dims must match the domain.
    const auto geo =
        std::filesystem::temp_directory_path() / "plbm_engine_geo.bin";
    plbm::iobench::save_geometry(plbm::iobench::make_empty_geometry(8, 8, 1),
                                 geo.string());
    ScenarioConfig cfg2 = base_cfg(32, 16, 16);
    cfg2.geometry_path = geo.string();
    CHECK_THROWS_AS((void)make_state(cfg2), std::runtime_error);
    std::filesystem::remove(geo);
}

TEST_CASE("apply_overrides rewrites exactly the requested fields") {
    ScenarioConfig cfg = base_cfg(32, 16, 16);
    RunOverrides ov;
    ov.mode = plbm::iobench::RunMode::Progressive;
    ov.devices = 6;
    ov.policy = plbm::sched::AssignPolicy::Simple;
    ov.output_dir = "elsewhere";
    ov.workers = 3;
    const ScenarioConfig out = apply_overrides(cfg, ov);
    CHECK(out.mode == plbm::iobench::RunMode::Progressive);
    CHECK(out.devices == 6);
    CHECK(out.policy == plbm::sched::AssignPolicy::Simple);
    CHECK(out.output_dir == "elsewhere");
    CHECK(out.workers == 3);
    CHECK(out.domain == cfg.domain); // untouched
    const ScenarioConfig same = apply_overrides(cfg, RunOverrides{});
    CHECK(same.mode == cfg.mode);
    CHECK(same.devices == cfg.devices);
}

TEST_CASE("solid walls bounce back: closed box keeps mass without leaks") {
    ScenarioConfig cfg = base_cfg(32, 32, 16);
    // Build a closed box as a solid one-cell shell.
    plbm::iobench::GeometryMask geom =
        plbm::iobench::make_empty_geometry(32, 32, 1);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            if (x == 0 || y == 0 || x == 31 || y == 31)
                geom.set(x, y, 0, true);
    const auto geo =
        std::filesystem::temp_directory_path() / "plbm_engine_box.bin";
    plbm::iobench::save_geometry(geom, geo.string());
    cfg.geometry_path = geo.string();
    cfg.seeds.push_back(box_seed(8, 8, 20, 20, 1.3, {0.04, 0.02, 0}));

    auto s = make_state(cfg);
    Engine eng(*s, 1);
    const double m0 = interior_mass(*s);
    for (int k = 0; k < 50; ++k) eng.step();
    CHECK(std::abs(interior_mass(*s) - m0) / m0 < 1e-12);
    std::filesystem::remove(geo);
}
