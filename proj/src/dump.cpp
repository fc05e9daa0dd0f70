#include "plbm/dump.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace plbm::iobench {

bool is_dump_field(const std::string& field) {
    return field == "rho" || field == "u_magnitude" || field == "psi";
}

double ambient_fill(const mesh::TileMap& map, const std::string& field,
                    int component) {
    if (field == "rho") return map.ambient().rho[std::size_t(component)];
    if (field == "psi") return map.ambient().psi[std::size_t(component)];
    return 0.0; // u_magnitude
}

std::vector<double> gather_field(const mesh::TileMap& map,
                                 std::array<int, 3> domain,
                                 const std::string& field, int component) {
    if (!is_dump_field(field))
        throw std::runtime_error("dump: unknown field '" + field + "'");
    const double fill = ambient_fill(map, field, component);
    std::vector<double> grid(std::size_t(domain[0]) * domain[1] * domain[2],
                             fill);
    const auto c = std::size_t(component);
    for (const auto& [coords, tp] : map.tiles()) {
        const mesh::Tile& t = *tp;
        const mesh::ComponentState& cs = t.comp[c];
        const int e = t.extent;
        const int zhi = t.three_d ? e : 1;
        for (int lz = 0; lz < zhi; ++lz)
            for (int ly = 0; ly < e; ++ly)
                for (int lx = 0; lx < e; ++lx) {
                    const std::size_t cell = t.gidx(lx, ly, lz);
                    double v;
                    if (field == "rho") {
                        v = t.solid[cell] ? 0.0 : cs.rho[cell];
                    } else if (field == "psi") {
                        v = cs.psi[cell];
                    } else {
                        const double ux = cs.ux[cell], uy = cs.uy[cell],
                                     uz = cs.uz[cell];
                        v = std::sqrt(ux * ux + uy * uy + uz * uz);
                    }
                    const std::size_t g =
                        std::size_t(t.origin_x() + lx) +
                        std::size_t(domain[0]) *
                            (std::size_t(t.origin_y() + ly) +
                             std::size_t(domain[1]) *
                                 std::size_t(t.origin_z() + lz));
                    grid[g] = v;
                }
    }
    return grid;
}

void dump_field(const mesh::TileMap& map, std::array<int, 3> domain,
                const std::string& field, int component, long iteration,
                const std::string& base_path, bool with_pgm) {
    const std::vector<double> grid =
        gather_field(map, domain, field, component);

    const std::string raw_path = base_path + ".raw";
    {
        std::ofstream out(raw_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("dump: cannot write '" + raw_path + "'");
        out.write(reinterpret_cast<const char*>(grid.data()),
                  std::streamsize(grid.size() * sizeof(double)));
        if (!out)
            throw std::runtime_error("dump: write failed for '" + raw_path +
                                     "'");
    }

    double lo = grid[0], hi = grid[0];
    if (with_pgm)
        for (double v : grid) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }

    {
        const std::string meta_path = base_path + ".meta";
        std::ofstream out(meta_path, std::ios::trunc);
        if (!out)
            throw std::runtime_error("dump: cannot write '" + meta_path +
                                     "'");
        out.precision(17);
        out << "dims " << domain[0] << ' ' << domain[1] << ' ' << domain[2]
            << "\nfield " << field << "\ncomponent " << component
            << "\niteration " << iteration << "\nfill "
            << ambient_fill(map, field, component)
            << "\nlayout x-fastest float64 little-endian\n";
        if (with_pgm) out << "pgm_min " << lo << "\npgm_max " << hi << '\n';
    }

    if (with_pgm) {
        // Mid-z slice, min-max normalized to 8-bit grayscale.
        const std::string pgm_path = base_path + ".pgm";
        std::ofstream out(pgm_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("dump: cannot write '" + pgm_path + "'");
        out << "P5\n" << domain[0] << ' ' << domain[1] << "\n255\n";
        const std::size_t z = std::size_t(domain[2] / 2);
        const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
        std::vector<std::uint8_t> row(static_cast<std::size_t>(domain[0]));
        for (int y = 0; y < domain[1]; ++y) {
            for (int x = 0; x < domain[0]; ++x) {
                const double v =
                    grid[std::size_t(x) +
                         std::size_t(domain[0]) *
                             (std::size_t(y) + std::size_t(domain[1]) * z)];
                row[std::size_t(x)] =
                    std::uint8_t(std::lround((v - lo) * scale));
            }
            out.write(reinterpret_cast<const char*>(row.data()),
                      std::streamsize(row.size()));
        }
    }
}

std::vector<double> read_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("dump: cannot open '" + path + "'");
    const std::streamsize bytes = in.tellg();
    if (bytes % std::streamsize(sizeof(double)) != 0)
        throw std::runtime_error("dump: '" + path +
                                 "' is not a whole number of f64 values");
    std::vector<double> out(std::size_t(bytes) / sizeof(double));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(out.data()), bytes);
    if (!in) throw std::runtime_error("dump: short read from '" + path + "'");
    return out;
}

} // namespace plbm::iobench
