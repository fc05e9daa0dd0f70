#include "plbm/scenario.hpp"

#include "plbm/dump.hpp"
#include "plbm/toml.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace plbm::iobench {

namespace {

using toml::Table;
using toml::Value;

[[noreturn]] void bad(const std::string& msg) {
    throw std::runtime_error("config: " + msg);
}

// Tracks key consumption so leftovers can be rejected by name.
struct TableReader {
    const Table& t;
    std::string where;
    std::set<std::string> used;

    const Value* find(const std::string& key) {
        auto it = t.kv.find(key);
        if (it == t.kv.end()) return nullptr;
        used.insert(key);
        return &it->second;
    }
    const Value& require(const std::string& key) {
        const Value* v = find(key);
        if (!v) bad(where + ": missing required key '" + key + "'");
        return *v;
    }
    double number(const std::string& key, double def) {
        const Value* v = find(key);
        if (!v) return def;
        if (v->type != Value::Type::Number)
            bad(where + ": '" + key + "' must be a number");
        return v->num;
    }
    double number_req(const std::string& key) {
        const Value& v = require(key);
        if (v.type != Value::Type::Number)
            bad(where + ": '" + key + "' must be a number");
        return v.num;
    }
    long integer(const std::string& key, long def) {
        const Value* v = find(key);
        if (!v) return def;
        if (v->type != Value::Type::Number || v->num != std::floor(v->num))
            bad(where + ": '" + key + "' must be an integer");
        return long(v->num);
    }
    std::string str(const std::string& key, const std::string& def) {
        const Value* v = find(key);
        if (!v) return def;
        if (v->type != Value::Type::String)
            bad(where + ": '" + key + "' must be a string");
        return v->str;
    }
    bool boolean(const std::string& key, bool def) {
        const Value* v = find(key);
        if (!v) return def;
        if (v->type != Value::Type::Boolean)
            bad(where + ": '" + key + "' must be true or false");
        return v->boolean;
    }
    std::vector<double> num_array(const std::string& key, std::size_t n,
                                  bool required) {
        const Value* v = required ? &require(key) : find(key);
        if (!v) return {};
        if (v->type != Value::Type::Array)
            bad(where + ": '" + key + "' must be an array");
        std::vector<double> out;
        for (const auto& e : v->array) {
            if (e.type != Value::Type::Number)
                bad(where + ": '" + key + "' must hold numbers");
            out.push_back(e.num);
        }
        if (n != 0 && out.size() != n)
            bad(where + ": '" + key + "' must have " + std::to_string(n) +
                " entries");
        return out;
    }
    std::vector<std::string> str_array(const std::string& key) {
        const Value* v = find(key);
        if (!v) return {};
        if (v->type != Value::Type::Array)
            bad(where + ": '" + key + "' must be an array");
        std::vector<std::string> out;
        for (const auto& e : v->array) {
            if (e.type != Value::Type::String)
                bad(where + ": '" + key + "' must hold strings");
            out.push_back(e.str);
        }
        return out;
    }
    void finish() {
        for (const auto& [k, v] : t.kv)
            if (!used.count(k)) bad(where + ": unknown key '" + k + "'");
    }
};

plbm::physics::ComponentParams read_component(const Table& t, int index) {
    TableReader r{t, "[[component]] #" + std::to_string(index)};
    plbm::physics::ComponentParams p;
    p.tau = r.number_req("tau");
    p.rho_ambient = r.number_req("rho_ambient");
    p.g_self = r.number("g_self", -1.0);
    p.beta = r.number("beta", 1.16);
    auto grav = r.num_array("gravity", 3, false);
    if (!grav.empty()) p.gravity = {grav[0], grav[1], grav[2]};

    p.eos.R = r.number("R", 1.0);
    p.eos.T = r.number("T", plbm::lattice::kCs2);
    p.eos.Tc = r.number("Tc", 0.0);
    p.eos.omega = r.number("omega", 0.0);
    const Value* pa = r.find("a");
    const Value* pb = r.find("b");
    const Value* pc = r.find("pc");
    if (pc) {
        if (pa || pb)
            bad(r.where + ": give either a/b or Tc/pc, not both");
        if (!(p.eos.Tc > 0.0))
            bad(r.where + ": pc requires a positive Tc");
        plbm::physics::pr_from_critical(p.eos.Tc, pc->num, p.eos.R, p.eos.a,
                                        p.eos.b);
    } else {
        p.eos.a = pa ? pa->num : 0.0;
        p.eos.b = pb ? pb->num : 0.0;
    }
    r.finish();
    return p;
}

SeedRegion read_seed(const Table& t, int index, int n_components) {
    TableReader r{t, "[[seed]] #" + std::to_string(index)};
    SeedRegion s;
    const std::string shape = r.str("shape", "box");
    if (shape == "box") {
        s.shape = SeedRegion::Shape::Box;
        auto mn = r.num_array("min", 3, true);
        auto mx = r.num_array("max", 3, true);
        s.box_min = {mn[0], mn[1], mn[2]};
        s.box_max = {mx[0], mx[1], mx[2]};
        for (int d = 0; d < 3; ++d)
            if (!(s.box_min[d] < s.box_max[d]))
                bad(r.where + ": box min must be below max on every axis");
    } else if (shape == "sphere") {
        s.shape = SeedRegion::Shape::Sphere;
        auto c = r.num_array("center", 3, true);
        s.center = {c[0], c[1], c[2]};
        s.radius = r.number_req("radius");
        if (!(s.radius > 0)) bad(r.where + ": radius must be positive");
    } else {
        bad(r.where + ": shape must be 'box' or 'sphere'");
    }
    s.component = int(r.integer("component", 0));
    if (s.component < 0 || s.component >= n_components)
        bad(r.where + ": component index out of range");
    s.rho = r.number_req("rho");
    if (!(s.rho > 0)) bad(r.where + ": rho must be positive");
    auto vel = r.num_array("velocity", 3, false);
    if (!vel.empty()) s.velocity = {vel[0], vel[1], vel[2]};
    r.finish();
    return s;
}

} // namespace

bool SeedRegion::contains(double x, double y, double z) const {
    if (shape == Shape::Box)
        return x >= box_min[0] && x < box_max[0] && y >= box_min[1] &&
               y < box_max[1] && z >= box_min[2] && z < box_max[2];
    const double dx = x - center[0], dy = y - center[1], dz = z - center[2];
    return dx * dx + dy * dy + dz * dz <= radius * radius;
}

ScenarioConfig load_config(const std::string& path) {
    const Table root = toml::parse_file(path);
    const std::filesystem::path dir =
        std::filesystem::path(path).parent_path();

    ScenarioConfig cfg;
    TableReader r{root, "top level"};
    cfg.name = r.str("name", "scenario");

    const std::string st = r.str("stencil", "");
    if (st == "D2Q9") cfg.stencil = plbm::lattice::StencilKind::D2Q9;
    else if (st == "D3Q19") cfg.stencil = plbm::lattice::StencilKind::D3Q19;
    else bad("stencil must be \"D2Q9\" or \"D3Q19\"");

    auto dom = r.num_array("domain", 3, true);
    for (int d = 0; d < 3; ++d) {
        if (dom[d] != std::floor(dom[d]) || dom[d] < 1)
            bad("domain entries must be positive integers");
        cfg.domain[d] = int(dom[d]);
    }
    cfg.tile_extent = int(r.integer("tile_extent", 32));
    const std::string mode = r.str("mode", "progressive");
    if (mode == "static") cfg.mode = RunMode::Static;
    else if (mode == "progressive") cfg.mode = RunMode::Progressive;
    else bad("mode must be \"static\" or \"progressive\"");

    cfg.iterations = r.integer("iterations", -1);
    cfg.report_interval = r.integer("report_interval", 10);
    cfg.snapshot_interval = r.integer("snapshot_interval", 0);
    cfg.threshold = r.number("threshold", 0.0);
    cfg.devices = int(r.integer("devices", 1));
    const std::string pol = r.str("policy", "optimized");
    if (pol == "simple") cfg.policy = plbm::sched::AssignPolicy::Simple;
    else if (pol == "optimized")
        cfg.policy = plbm::sched::AssignPolicy::Optimized;
    else bad("policy must be \"simple\" or \"optimized\"");

    cfg.topology_path = r.str("topology", "");
    cfg.weight_p2p = r.number("weight_p2p", 0.5);
    cfg.weight_staged = r.number("weight_staged", 1.0);
    cfg.geometry_path = r.str("geometry", "");
    cfg.output_dir = r.str("output", "out");
    for (std::string* p : {&cfg.topology_path, &cfg.geometry_path})
        if (!p->empty() && std::filesystem::path(*p).is_relative())
            *p = (dir / *p).string();

    auto bnd = r.str_array("boundary");
    if (!bnd.empty()) {
        if (bnd.size() != 3) bad("boundary must list three axes");
        for (int d = 0; d < 3; ++d) {
            if (bnd[d] == "ambient") cfg.boundary[d] = BoundaryKind::Ambient;
            else if (bnd[d] == "periodic")
                cfg.boundary[d] = BoundaryKind::Periodic;
            else bad("boundary entries must be \"ambient\" or \"periodic\"");
        }
    }
    auto fields = r.str_array("snapshot_fields");
    if (!fields.empty()) cfg.snapshot_fields = fields;
    cfg.snapshot_pgm = r.boolean("snapshot_pgm", false);
    cfg.workers = int(r.integer("workers", 0));
    r.finish();

    for (const auto& [name, sub] : root.subs)
        bad("unknown table [" + name + "]");

    auto comp_it = root.lists.find("component");
    if (comp_it == root.lists.end() || comp_it->second.empty())
        bad("at least one [[component]] is required");
    int ci = 0;
    for (const Table& t : comp_it->second)
        cfg.components.push_back(read_component(t, ci++));

    const int n = cfg.n_components();
    cfg.coupling.n = n;
    cfg.coupling.g.assign(std::size_t(n) * n, 0.0);
    if (auto it = root.lists.find("coupling"); it != root.lists.end()) {
        int k = 0;
        for (const Table& t : it->second) {
            TableReader cr{t, "[[coupling]] #" + std::to_string(k++)};
            auto pair = cr.num_array("pair", 2, true);
            const double g = cr.number_req("g");
            cr.finish();
            const int a = int(pair[0]), b = int(pair[1]);
            if (pair[0] != std::floor(pair[0]) ||
                pair[1] != std::floor(pair[1]) || a < 0 || b < 0 || a >= n ||
                b >= n)
                bad("coupling pair indices out of range");
            if (a == b) bad("coupling pair must name two distinct components");
            if (cfg.coupling.at(a, b) != 0.0)
                bad("duplicate coupling pair");
            cfg.coupling.g[std::size_t(a) * n + b] = g;
            cfg.coupling.g[std::size_t(b) * n + a] = g;
        }
    }

    if (auto it = root.lists.find("seed"); it != root.lists.end()) {
        int si = 0;
        for (const Table& t : it->second)
            cfg.seeds.push_back(read_seed(t, si++, n));
    }

    for (const auto& [name, list] : root.lists)
        if (name != "component" && name != "coupling" && name != "seed")
            bad("unknown table [[" + name + "]]");

    validate_config(cfg);
    return cfg;
}

void validate_config(const ScenarioConfig& cfg) {
    if (cfg.name.empty()) bad("name must be non-empty");
    if (cfg.iterations < 0) bad("iterations must be a non-negative integer");
    if (cfg.report_interval < 1) bad("report_interval must be >= 1");
    if (cfg.snapshot_interval < 0) bad("snapshot_interval must be >= 0");
    if (cfg.tile_extent < 4) bad("tile_extent must be >= 4");
    if (!(cfg.threshold >= 0)) bad("threshold must be >= 0");
    if (cfg.devices < 1) bad("devices must be >= 1");
    if (cfg.workers < 0) bad("workers must be >= 0");
    if (!(cfg.weight_p2p > 0) || cfg.weight_p2p > cfg.weight_staged)
        bad("need 0 < weight_p2p <= weight_staged");
    if (cfg.components.empty()) bad("at least one component is required");
    for (const std::string& f : cfg.snapshot_fields)
        if (!is_dump_field(f)) bad("unknown snapshot field '" + f + "'");

    const bool three_d = cfg.three_d();
    if (cfg.domain[0] < 1 || cfg.domain[1] < 1 || cfg.domain[2] < 1)
        bad("domain dimensions must be positive");
    if (!three_d && cfg.domain[2] != 1)
        bad("D2Q9 requires domain = [nx, ny, 1]");
    const int axes = three_d ? 3 : 2;
    for (int d = 0; d < axes; ++d)
        if (cfg.domain[d] % cfg.tile_extent != 0)
            bad("domain axis " + std::to_string(d) +
                " not divisible by tile_extent");
    if (!three_d && cfg.boundary[2] == BoundaryKind::Periodic)
        bad("z boundary is meaningless for D2Q9");

    const int n = cfg.n_components();
    if (cfg.coupling.n != n ||
        cfg.coupling.g.size() != std::size_t(n) * std::size_t(n))
        bad("coupling matrix shape does not match the component count");
    for (int a = 0; a < n; ++a) {
        if (cfg.coupling.at(a, a) != 0.0)
            bad("coupling diagonal must be zero");
        for (int b = 0; b < n; ++b)
            if (cfg.coupling.at(a, b) != cfg.coupling.at(b, a))
                bad("coupling matrix must be symmetric");
    }

    int ci = 0;
    for (const auto& c : cfg.components) {
        const std::string who = "component " + std::to_string(ci++);
        if (!(c.tau > 0.5)) bad(who + ": tau must be > 0.5");
        if (!(c.rho_ambient > 0)) bad(who + ": rho_ambient must be > 0");
        if (c.g_self == 0.0) bad(who + ": g_self must be nonzero");
        if (c.beta < 1.0 || c.beta > 1.5)
            bad(who + ": beta must lie in [1, 1.5]");
        if (c.eos.b < 0) bad(who + ": b must be >= 0");
        if (c.eos.b * c.rho_ambient >= 1.0)
            bad(who + ": rho_ambient is beyond the EOS pole (b*rho >= 1)");
        if (!(c.eos.R > 0)) bad(who + ": R must be > 0");
        if (!(c.eos.T > 0)) bad(who + ": T must be > 0");
    }

    int si = 0;
    for (const auto& s : cfg.seeds) {
        const std::string who = "seed " + std::to_string(si++);
        if (s.component < 0 || s.component >= n)
            bad(who + ": component index out of range");
        const double vmag =
            std::sqrt(s.velocity[0] * s.velocity[0] +
                      s.velocity[1] * s.velocity[1] +
                      s.velocity[2] * s.velocity[2]);
        if (vmag >= 1.0) bad(who + ": |velocity| must be < 1 lattice unit");
        const auto& b = cfg.components[std::size_t(s.component)].eos.b;
        if (b * s.rho >= 1.0)
            bad(who + ": rho is beyond the EOS pole (b*rho >= 1)");
    }
}

} // namespace plbm::iobench
